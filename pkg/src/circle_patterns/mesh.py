"""Triangulated disks and the angle data attached to them.

A :class:`Triangulation` is built from counterclockwise faces; edges, the
boundary cycle and the interior vertex set are derived.  :class:`PatternWeights`
carries the overlap angle of every edge and the corner angle of every boundary
vertex.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    InconsistentOrientation,
    InvalidFace,
    MultipleBoundaryComponents,
    NonManifoldEdge,
    NotADisk,
)

ANGLE_SUM_TOL = 1e-9
# I >= 0 is tested against this slack so that cos(pi/2) ~ 6e-17 style noise passes.
INTERSECTION_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Triangulation:
    """An oriented triangulation of a closed disk.

    ``faces[f]`` lists the vertices of face ``f`` counterclockwise.  ``edges``
    holds each undirected edge once as ``(u, v)`` with ``u < v``, sorted
    lexicographically.  ``face_edges[f, i]`` is the index of the edge of face
    ``f`` opposite its ``i``-th corner.
    """

    vertex_count: int
    faces: np.ndarray
    edges: np.ndarray
    face_edges: np.ndarray
    boundary_cycle: tuple[int, ...]
    interior_vertices: tuple[int, ...]
    edge_faces: tuple[tuple[int, ...], ...]
    _edge_ids: dict = field(repr=False)

    @property
    def face_count(self) -> int:
        return len(self.faces)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def is_boundary_vertex(self) -> np.ndarray:
        mask = np.zeros(self.vertex_count, dtype=bool)
        mask[list(self.boundary_cycle)] = True
        return mask

    def edge_index(self, u: int, v: int) -> int:
        """Index of the undirected edge ``{u, v}``; KeyError if absent."""
        return self._edge_ids[(u, v) if u < v else (v, u)]

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self._edge_ids

    def boundary_edges(self) -> list[tuple[int, int]]:
        """Directed boundary edges in cycle order."""
        cyc = self.boundary_cycle
        return [(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc))]

    def neighbors(self) -> list[list[int]]:
        nbrs: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for u, v in self.edges:
            nbrs[u].append(int(v))
            nbrs[v].append(int(u))
        return nbrs


def build_triangulation(faces: Sequence[Sequence[int]], vertex_count: int) -> Triangulation:
    """Derive edges, boundary and interior of a triangulated disk.

    Raises a :class:`~circle_patterns.errors.MeshError` subclass when the
    faces are not an orientable, connected, manifold disk with one boundary
    cycle.
    """
    if vertex_count < 3:
        raise InvalidFace(f"vertex_count must be at least 3, got {vertex_count}")
    if len(faces) == 0:
        raise InvalidFace("face list is empty")
    tris = []
    for f, face in enumerate(faces):
        if len(face) != 3:
            raise InvalidFace(f"face {f} has {len(face)} vertices, expected 3")
        a, b, c = (int(x) for x in face)
        for x in (a, b, c):
            if not 0 <= x < vertex_count:
                raise InvalidFace(f"face {f} references vertex {x} outside [0, {vertex_count})")
        if len({a, b, c}) != 3:
            raise InvalidFace(f"face {f} repeats a vertex: {(a, b, c)}")
        tris.append((a, b, c))

    directed: dict[tuple[int, int], list[int]] = defaultdict(list)
    undirected: dict[tuple[int, int], list[int]] = defaultdict(list)
    for f, (a, b, c) in enumerate(tris):
        for u, v in ((a, b), (b, c), (c, a)):
            directed[(u, v)].append(f)
            undirected[(min(u, v), max(u, v))].append(f)

    for e, fs in undirected.items():
        if len(fs) > 2:
            raise NonManifoldEdge(f"edge {e} belongs to {len(fs)} faces {fs}")
    for (u, v), fs in directed.items():
        if len(fs) > 1:
            raise InconsistentOrientation(
                f"directed edge ({u}, {v}) appears in faces {fs}; neighbouring faces must traverse it oppositely"
            )

    used = sorted({x for tri in tris for x in tri})
    if len(used) != vertex_count:
        missing = sorted(set(range(vertex_count)) - set(used))
        raise NotADisk(f"vertices {missing} belong to no face")

    # Boundary: directed edges whose reverse is absent; interior lies to their left.
    succ: dict[int, int] = {}
    for (u, v) in directed:
        if (v, u) not in directed:
            if u in succ:
                raise NotADisk(f"boundary pinches at vertex {u}")
            succ[u] = v
    if not succ:
        raise NotADisk("triangulation has no boundary (closed surface)")

    cycles = []
    remaining = set(succ)
    while remaining:
        start = min(remaining)
        cyc = [start]
        remaining.discard(start)
        nxt = succ[start]
        while nxt != start:
            if nxt not in remaining:
                raise NotADisk(f"boundary pinches at vertex {nxt}")
            cyc.append(nxt)
            remaining.discard(nxt)
            nxt = succ[nxt]
        cycles.append(cyc)
    if len(cycles) > 1:
        raise MultipleBoundaryComponents(f"found {len(cycles)} boundary cycles")
    boundary = tuple(cycles[0])

    _check_connected(tris, vertex_count)

    n_edges = len(undirected)
    euler = vertex_count - n_edges + len(tris)
    if euler != 1:
        raise NotADisk(f"Euler characteristic V - E + F = {euler}, a disk needs 1")

    edge_list = sorted(undirected)
    edge_ids = {e: i for i, e in enumerate(edge_list)}
    face_edges = np.empty((len(tris), 3), dtype=np.intp)
    for f, (a, b, c) in enumerate(tris):
        for i, (u, v) in enumerate(((b, c), (c, a), (a, b))):
            face_edges[f, i] = edge_ids[(min(u, v), max(u, v))]

    on_boundary = set(boundary)
    return Triangulation(
        vertex_count=vertex_count,
        faces=_frozen(np.array(tris, dtype=np.intp)),
        edges=_frozen(np.array(edge_list, dtype=np.intp).reshape(-1, 2)),
        face_edges=_frozen(face_edges),
        boundary_cycle=boundary,
        interior_vertices=tuple(v for v in range(vertex_count) if v not in on_boundary),
        edge_faces=tuple(tuple(undirected[e]) for e in edge_list),
        _edge_ids=edge_ids,
    )


def _check_connected(tris, vertex_count):
    parent = list(range(vertex_count))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b, c in tris:
        ra, rb, rc = find(a), find(b), find(c)
        parent[rb] = ra
        parent[find(rc)] = ra
    roots = {find(v) for v in range(vertex_count)}
    if len(roots) > 1:
        raise NotADisk(f"triangulation has {len(roots)} connected components")


@dataclass(frozen=True, eq=False)
class PatternWeights:
    """Overlap angle per edge (aligned with ``Triangulation.edges``) and
    corner angle per boundary vertex, all in radians."""

    overlap: np.ndarray
    boundary_angle: Mapping[int, float]

    def overlap_between(self, t: Triangulation, u: int, v: int) -> float:
        return float(self.overlap[t.edge_index(u, v)])

    def target_angles(self, t: Triangulation) -> np.ndarray:
        """Angle sum each vertex must reach: 2*pi inside, theta_v on the boundary."""
        target = np.full(t.vertex_count, 2.0 * math.pi)
        for v in t.boundary_cycle:
            target[v] = self.boundary_angle[v]
        return target


def make_weights(
    t: Triangulation,
    overlap: Mapping[tuple[int, int], float] | None = None,
    boundary_angle: Mapping[int, float] | None = None,
) -> PatternWeights:
    """Build weights from sparse maps; omitted edges are tangent (0) and
    omitted boundary vertices are straight (pi).

    Edge keys may be given in either order.  KeyError for an edge that is
    not in ``t``.  Boundary-angle keys are kept as given, so entries on
    interior vertices survive to be reported by :func:`validate_weights`.
    """
    theta = np.zeros(t.edge_count)
    for (u, v), value in (overlap or {}).items():
        theta[t.edge_index(int(u), int(v))] = float(value)
    angles = {v: math.pi for v in t.boundary_cycle}
    for v, value in (boundary_angle or {}).items():
        angles[int(v)] = float(value)
    return PatternWeights(overlap=_frozen(theta), boundary_angle=dict(sorted(angles.items())))


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def corner_intersection_coefficients(t: Triangulation, w: PatternWeights) -> np.ndarray:
    """``I[f, i]`` for corner ``i`` of face ``f``: cos of the opposite edge's
    overlap plus the product of cosines of the two adjacent edges."""
    cos_t = np.cos(w.overlap)[t.face_edges]
    return cos_t + np.roll(cos_t, -1, axis=1) * np.roll(cos_t, 1, axis=1)


def validate_weights(t: Triangulation, w: PatternWeights) -> ValidationReport:
    problems: list[str] = []
    if w.overlap.shape != (t.edge_count,):
        return ValidationReport((f"overlap has shape {w.overlap.shape}, expected ({t.edge_count},)",))

    for e, (u, v) in enumerate(t.edges):
        theta = w.overlap[e]
        if not (0.0 <= theta < math.pi):
            problems.append(f"overlap angle on edge ({u}, {v}) is {theta!r}, must lie in [0, pi)")

    boundary = set(t.boundary_cycle)
    for v, theta in w.boundary_angle.items():
        if v not in boundary:
            problems.append(f"vertex {v} is interior and cannot carry a boundary angle")
        elif not (0.0 < theta <= math.pi):
            problems.append(f"boundary angle at vertex {v} is {theta!r}, must lie in (0, pi]")
    for v in t.boundary_cycle:
        if v not in w.boundary_angle:
            problems.append(f"boundary vertex {v} has no boundary angle")

    if not problems:
        coeff = corner_intersection_coefficients(t, w)
        for f, i in zip(*np.nonzero(coeff < -INTERSECTION_TOL)):
            a, b, c = np.roll(t.faces[f], -i)
            problems.append(
                f"face {f} {tuple(int(x) for x in t.faces[f])}: intersection coefficient at vertex {a} "
                f"opposite edge ({b}, {c}) is {coeff[f, i]:.6g} < 0"
            )

        total = sum(w.boundary_angle[v] for v in t.boundary_cycle)
        expected = (len(t.boundary_cycle) - 2) * math.pi
        if abs(total - expected) > ANGLE_SUM_TOL:
            problems.append(
                f"boundary angles sum to {total:.12g} = {total / math.pi:.9g}*pi, "
                f"a flat pattern with {len(t.boundary_cycle)} boundary vertices needs "
                f"{len(t.boundary_cycle) - 2}*pi"
            )
    return ValidationReport(tuple(problems))


def generate_hex_disk(generations: int) -> tuple[Triangulation, PatternWeights]:
    """Hexagonal patch of the triangular lattice with ``generations`` rings.

    All overlaps are tangent.  The six lattice corners get angle 2*pi/3 and
    the remaining boundary vertices are straight.
    """
    if generations < 1:
        raise ValueError(f"generations must be >= 1, got {generations}")
    n = generations

    def ring(q, r):
        return max(abs(q), abs(r), abs(q + r))

    pts = [(q, r) for q in range(-n, n + 1) for r in range(-n, n + 1) if ring(q, r) <= n]

    def polar(p):
        q, r = p
        x, y = q + 0.5 * r, (math.sqrt(3) / 2) * r
        return ring(q, r), math.atan2(y, x) % (2 * math.pi)

    pts.sort(key=polar)
    index = {p: i for i, p in enumerate(pts)}

    faces = []
    # Down triangles can have all corners inside while their anchor lies outside.
    anchors = [(q, r) for q in range(-n - 1, n + 1) for r in range(-n - 1, n + 1)]
    for q, r in anchors:
        up = ((q, r), (q + 1, r), (q, r + 1))
        down = ((q + 1, r), (q + 1, r + 1), (q, r + 1))
        for tri in (up, down):
            if all(p in index for p in tri):
                faces.append(tuple(index[p] for p in tri))
    faces.sort()
    t = build_triangulation(faces, len(pts))

    corners = {index[p] for p in ((n, 0), (0, n), (-n, n), (-n, 0), (0, -n), (n, -n))}
    angles = {v: (2 * math.pi / 3 if v in corners else math.pi) for v in t.boundary_cycle}
    return t, make_weights(t, boundary_angle=angles)
