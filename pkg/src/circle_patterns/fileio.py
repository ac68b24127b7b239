"""JSON problem and solution files.

Problem file::

    {
      "vertex_count": 4,
      "faces": [[0, 1, 2], [0, 2, 3]],
      "overlap": [{"u": 0, "v": 2, "theta": "pi/3"}],
      "boundary_angles": [{"v": 0, "theta": "pi/2"}, ...],
      "initial_radii": [1, 1, 1, 1]
    }

Angles are radians; strings such as ``"pi"``, ``"2pi/3"`` or ``"0.5*pi"``
are accepted.  Omitted overlaps default to 0 and omitted boundary angles
to pi.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import MeshError, ParseError, ValidationError
from .mesh import PatternWeights, Triangulation, build_triangulation, make_weights, validate_weights

_PI_RE = re.compile(
    r"""^\s*
    (?P<coef>[+-]?(?:(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)?)
    \s*\*?\s*pi\s*
    (?:/\s*(?P<den>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?))?
    \s*$""",
    re.VERBOSE,
)


def parse_angle(value, field: str = "theta") -> float:
    """Radians from a number or a pi-expression such as ``"3pi/5"``."""
    if isinstance(value, bool):
        raise ParseError(f"expected an angle, got {value!r}", field=field)
    if isinstance(value, (int, float)):
        x = float(value)
    elif isinstance(value, str):
        m = _PI_RE.match(value)
        if m:
            coef = m.group("coef")
            coef = 1.0 if coef in (None, "", "+") else (-1.0 if coef == "-" else float(coef))
            den = float(m.group("den")) if m.group("den") else 1.0
            if den == 0:
                raise ParseError(f"division by zero in angle {value!r}", field=field)
            x = coef * math.pi / den
        else:
            try:
                x = float(value)
            except ValueError:
                raise ParseError(f"cannot read angle {value!r}", field=field) from None
    else:
        raise ParseError(f"expected an angle, got {type(value).__name__}", field=field)
    if not math.isfinite(x):
        raise ParseError(f"angle {value!r} is not finite", field=field)
    return x


@dataclass(frozen=True, eq=False)
class Problem:
    triangulation: Triangulation
    weights: PatternWeights
    initial_radii: np.ndarray | None = None

    def __eq__(self, other):
        if not isinstance(other, Problem):
            return NotImplemented
        a, b = self, other
        same_radii = (a.initial_radii is None and b.initial_radii is None) or (
            a.initial_radii is not None
            and b.initial_radii is not None
            and np.array_equal(a.initial_radii, b.initial_radii)
        )
        return (
            a.triangulation.vertex_count == b.triangulation.vertex_count
            and np.array_equal(a.triangulation.faces, b.triangulation.faces)
            and np.array_equal(a.weights.overlap, b.weights.overlap)
            and dict(a.weights.boundary_angle) == dict(b.weights.boundary_angle)
            and same_radii
        )


def _int(value, field):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"expected an integer, got {value!r}", field=field)
    return value


def _load_json(text: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    if not isinstance(data, dict):
        raise ParseError("top level must be an object")
    return data


def parse_problem(text: str) -> Problem:
    """Read and validate a problem; every weight violation is reported at once."""
    data = _load_json(text)
    unknown = sorted(set(data) - {"vertex_count", "faces", "overlap", "boundary_angles", "initial_radii"})
    if unknown:
        raise ParseError(f"unknown keys {unknown}")
    if "vertex_count" not in data:
        raise ParseError("missing", field="vertex_count")
    if "faces" not in data:
        raise ParseError("missing", field="faces")
    n = _int(data["vertex_count"], "vertex_count")
    faces_raw = data["faces"]
    if not isinstance(faces_raw, list):
        raise ParseError("expected an array of vertex triples", field="faces")
    faces = []
    for i, face in enumerate(faces_raw):
        fld = f"faces[{i}]"
        if not isinstance(face, list) or len(face) != 3:
            raise ParseError("expected 3 vertex indices", field=fld)
        faces.append(tuple(_int(x, fld) for x in face))

    overlap: dict[tuple[int, int], float] = {}
    for i, entry in enumerate(data.get("overlap", [])):
        fld = f"overlap[{i}]"
        if not isinstance(entry, dict) or set(entry) != {"u", "v", "theta"}:
            raise ParseError("expected an object with keys u, v, theta", field=fld)
        u, v = _int(entry["u"], fld + ".u"), _int(entry["v"], fld + ".v")
        key = (min(u, v), max(u, v))
        if key in overlap:
            raise ParseError(f"edge {key} listed twice", field=fld)
        overlap[key] = parse_angle(entry["theta"], fld + ".theta")

    angles: dict[int, float] = {}
    for i, entry in enumerate(data.get("boundary_angles", [])):
        fld = f"boundary_angles[{i}]"
        if not isinstance(entry, dict) or set(entry) != {"v", "theta"}:
            raise ParseError("expected an object with keys v, theta", field=fld)
        v = _int(entry["v"], fld + ".v")
        if v in angles:
            raise ParseError(f"vertex {v} listed twice", field=fld)
        angles[v] = parse_angle(entry["theta"], fld + ".theta")

    radii = None
    if data.get("initial_radii") is not None:
        raw = data["initial_radii"]
        if not isinstance(raw, list) or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in raw):
            raise ParseError("expected an array of numbers", field="initial_radii")
        radii = np.array(raw, dtype=float)

    try:
        t = build_triangulation(faces, n)
    except MeshError as exc:
        raise ValidationError([str(exc)]) from exc

    problems = []
    missing = [e for e in overlap if not t.has_edge(*e)]
    problems += [f"overlap given for ({u}, {v}), which is not an edge" for u, v in missing]
    for e in missing:
        del overlap[e]
    out_of_range = [v for v in angles if not 0 <= v < n]
    problems += [f"boundary angle given for nonexistent vertex {v}" for v in out_of_range]
    for v in out_of_range:
        del angles[v]
    if radii is not None:
        if radii.shape != (n,):
            problems.append(f"initial_radii has {len(radii)} entries, expected {n}")
        elif not np.all(np.isfinite(radii) & (radii > 0)):
            problems.append("initial_radii must be finite and positive")

    w = make_weights(t, overlap, angles)
    problems += list(validate_weights(t, w).violations)
    if problems:
        raise ValidationError(problems)
    return Problem(t, w, radii)


def problem_to_dict(problem: Problem) -> dict:
    t, w = problem.triangulation, problem.weights
    out = {
        "vertex_count": t.vertex_count,
        "faces": [[int(x) for x in f] for f in t.faces],
        "overlap": [
            {"u": int(u), "v": int(v), "theta": float(theta)} for (u, v), theta in zip(t.edges, w.overlap) if theta != 0.0
        ],
        "boundary_angles": [{"v": int(v), "theta": float(theta)} for v, theta in w.boundary_angle.items()],
    }
    if problem.initial_radii is not None:
        out["initial_radii"] = [float(x) for x in problem.initial_radii]
    return out


def _dumps(obj) -> str:
    # Flat arrays go on a single line; nesting keeps json.dumps indentation.
    text = json.dumps(obj, indent=2, sort_keys=False, allow_nan=False)
    text = re.sub(r"\[\s+([^\[\]{}]*?)\s+\]", lambda m: "[" + re.sub(r",\s+", ", ", m.group(1)) + "]", text)
    return text + "\n"


def emit_problem(problem: Problem) -> str:
    return _dumps(problem_to_dict(problem))


def solution_to_dict(radii: np.ndarray, centers: np.ndarray, diagnostics: dict) -> dict:
    return {
        "radii": [float(x) for x in radii],
        "centers": [[float(x), float(y)] for x, y in centers],
        "diagnostics": diagnostics,
    }


def emit_solution(radii: np.ndarray, centers: np.ndarray, diagnostics: dict) -> str:
    return _dumps(solution_to_dict(radii, centers, diagnostics))


@dataclass(frozen=True)
class SolutionFile:
    radii: np.ndarray
    centers: np.ndarray
    diagnostics: dict


def parse_solution(text: str) -> SolutionFile:
    data = _load_json(text)
    for key in ("radii", "centers", "diagnostics"):
        if key not in data:
            raise ParseError("missing", field=key)
    try:
        radii = np.array(data["radii"], dtype=float)
        centers = np.array(data["centers"], dtype=float).reshape(-1, 2)
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc)) from None
    if len(radii) != len(centers):
        raise ParseError(f"{len(radii)} radii but {len(centers)} centers")
    return SolutionFile(radii, centers, dict(data["diagnostics"]))
