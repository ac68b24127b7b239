"""Euclidean circle-pattern geometry: lengths, angles, curvature, stiffness.

Radii are carried as log-radii ``u = log r`` throughout.  Per-face work is
vectorised over faces; per-vertex and per-edge sums use ``np.bincount`` in
face order, so results are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import DegenerateTriangle
from .mesh import PatternWeights, Triangulation, corner_intersection_coefficients

ARCCOS_CLAMP_TOL = 1e-12


def edge_length(r_u, r_v, theta):
    """Distance between centers of circles of radii ``r_u``, ``r_v`` meeting at
    overlap angle ``theta``."""
    return np.sqrt(r_u * r_u + r_v * r_v + 2.0 * r_u * r_v * np.cos(theta))


def intersection_coefficient(theta_vw, theta_uv, theta_uw):
    return np.cos(theta_vw) + np.cos(theta_uv) * np.cos(theta_uw)


def _law_of_cosines(a, b, c):
    # angle opposite side a
    return (b * b + c * c - a * a) / (2.0 * b * c)


def _faces_with_bad_sides(sides: np.ndarray) -> np.ndarray:
    a, b, c = sides[..., 0], sides[..., 1], sides[..., 2]
    ok = (a > 0) & (b > 0) & (c > 0) & (a < b + c) & (b < c + a) & (c < a + b)
    return ~ok


def _angles_from_sides(sides: np.ndarray) -> np.ndarray:
    """Angles opposite each column of an (..., 3) array of side lengths.

    Returns the angles and a boolean mask of rows that are degenerate.
    """
    a, b, c = sides[..., 0], sides[..., 1], sides[..., 2]
    cosines = np.stack(
        [_law_of_cosines(a, b, c), _law_of_cosines(b, c, a), _law_of_cosines(c, a, b)], axis=-1
    )
    bad = _faces_with_bad_sides(sides) | np.any(np.abs(cosines) > 1.0 + ARCCOS_CLAMP_TOL, axis=-1)
    with np.errstate(invalid="ignore"):
        angles = np.arccos(np.clip(cosines, -1.0, 1.0))
    return angles, bad


def triangle_angles(a: float, b: float, c: float) -> tuple[float, float, float]:
    """Angles opposite sides ``a``, ``b``, ``c`` by the law of cosines."""
    angles, bad = _angles_from_sides(np.array([a, b, c], dtype=float))
    if bad:
        raise DegenerateTriangle(f"sides ({a}, {b}, {c}) do not form a triangle")
    return tuple(float(x) for x in angles)


def _heron(sides: np.ndarray) -> np.ndarray:
    # Kahan's arrangement: sort descending, keep the parentheses.
    s = -np.sort(-sides, axis=-1)
    a, b, c = s[..., 0], s[..., 1], s[..., 2]
    prod = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
    return 0.25 * np.sqrt(np.maximum(prod, 0.0))


def triangle_area(a: float, b: float, c: float) -> float:
    sides = np.array([a, b, c], dtype=float)
    if _faces_with_bad_sides(sides):
        raise DegenerateTriangle(f"sides ({a}, {b}, {c}) do not form a triangle")
    return float(_heron(sides))


@dataclass
class RadiusState:
    """Log-radii plus the curvature and energy last evaluated at them."""

    log_radii: np.ndarray
    curvatures: np.ndarray | None = None
    energy: float | None = None

    @classmethod
    def from_radii(cls, radii) -> "RadiusState":
        radii = np.asarray(radii, dtype=float)
        if np.any(~np.isfinite(radii)) or np.any(radii <= 0):
            raise ValueError("radii must be finite and positive")
        return cls(np.log(radii))

    @property
    def radii(self) -> np.ndarray:
        return np.exp(self.log_radii)


@dataclass(frozen=True)
class StiffnessMatrix:
    """Symmetric curvature Jacobian ``dK_u/dlog r_v`` in edge form.

    ``off_diagonal[e]`` is the coefficient on ``edges[e]``; ``diagonal`` is the
    negative row sum.
    """

    edges: np.ndarray
    off_diagonal: np.ndarray
    diagonal: np.ndarray

    @property
    def size(self) -> int:
        return len(self.diagonal)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """``J @ x`` without forming a matrix; works on (n,) or (n, k) arrays."""
        a, b = self.edges[:, 0], self.edges[:, 1]
        c = self.off_diagonal if x.ndim == 1 else self.off_diagonal[:, None]
        diff = c * (x[b] - x[a])
        out = np.zeros_like(x, dtype=float)
        np.add.at(out, a, diff)
        np.add.at(out, b, -diff)
        return out

    def to_sparse(self) -> sparse.csr_matrix:
        a, b = self.edges[:, 0], self.edges[:, 1]
        n = self.size
        rows = np.concatenate([a, b, np.arange(n)])
        cols = np.concatenate([b, a, np.arange(n)])
        vals = np.concatenate([self.off_diagonal, self.off_diagonal, self.diagonal])
        return sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()


class PatternGeometry:
    """Caches the angle-dependent per-face constants of a (mesh, weights) pair
    and evaluates lengths, angles, curvature and stiffness at log-radii."""

    def __init__(self, t: Triangulation, w: PatternWeights):
        self.t = t
        self.w = w
        self.faces = t.faces
        theta = w.overlap[t.face_edges]  # theta[f, i]: overlap on the edge opposite corner i
        self.cos_opp = np.cos(theta)
        self.sin2_opp = np.sin(theta) ** 2
        self.coeff = corner_intersection_coefficients(t, w)
        self.target = w.target_angles(t)
        self.n = t.vertex_count
        self._flat_faces = t.faces.ravel()
        self._flat_edges = t.face_edges.ravel()

    def side_lengths(self, log_radii: np.ndarray) -> np.ndarray:
        """``L[f, i]``: length of the edge of face ``f`` opposite corner ``i``."""
        r = np.exp(log_radii)[self.faces]
        rj = np.roll(r, -1, axis=1)
        rk = np.roll(r, 1, axis=1)
        return np.sqrt(rj * rj + rk * rk + 2.0 * rj * rk * self.cos_opp)

    def corner_angles(self, log_radii: np.ndarray) -> np.ndarray:
        sides = self.side_lengths(log_radii)
        angles, bad = _angles_from_sides(sides)
        if np.any(bad):
            f = int(np.flatnonzero(bad)[0])
            raise DegenerateTriangle(
                f"face {f} {tuple(int(v) for v in self.faces[f])} has non-constructible sides "
                f"{tuple(float(s) for s in sides[f])}",
                face=f,
            )
        return angles

    def angle_sums(self, log_radii: np.ndarray) -> np.ndarray:
        return np.bincount(self._flat_faces, weights=self.corner_angles(log_radii).ravel(), minlength=self.n)

    def curvature(self, log_radii: np.ndarray) -> np.ndarray:
        return self.angle_sums(log_radii) - self.target

    def stiffness(self, log_radii: np.ndarray) -> StiffnessMatrix:
        r = np.exp(log_radii)[self.faces]
        sides = self.side_lengths(log_radii)
        if np.any(_faces_with_bad_sides(sides)):
            f = int(np.flatnonzero(_faces_with_bad_sides(sides))[0])
            raise DegenerateTriangle(f"face {f} has non-constructible sides", face=f)
        # Edge opposite corner k joins corners i = k+1 and j = k+2.
        ri, rj = np.roll(r, -1, axis=1), np.roll(r, -2, axis=1)
        ci, cj = np.roll(self.coeff, -1, axis=1), np.roll(self.coeff, -2, axis=1)
        double_area = 2.0 * _heron(sides)[:, None]
        contrib = ri * rj * (self.sin2_opp * ri * rj + (ci * ri + cj * rj) * r) / (sides * sides * double_area)
        off = np.bincount(self._flat_edges, weights=contrib.ravel(), minlength=self.t.edge_count)
        edges = self.t.edges
        rowsum = np.bincount(edges[:, 0], weights=off, minlength=self.n) + np.bincount(
            edges[:, 1], weights=off, minlength=self.n
        )
        return StiffnessMatrix(edges=edges, off_diagonal=off, diagonal=-rowsum)


def curvature(t: Triangulation, w: PatternWeights, state: RadiusState) -> np.ndarray:
    """Angle defect at every vertex; also refreshes ``state.curvatures`` and
    ``state.energy``."""
    k = PatternGeometry(t, w).curvature(state.log_radii)
    state.curvatures = k
    state.energy = float(k @ k)
    return k


def stiffness(t: Triangulation, w: PatternWeights, state: RadiusState) -> StiffnessMatrix:
    return PatternGeometry(t, w).stiffness(state.log_radii)


def total_angle(t: Triangulation, w: PatternWeights, state: RadiusState) -> float:
    """Sum of all corner angles; equals pi times the face count for any radii."""
    return float(PatternGeometry(t, w).angle_sums(state.log_radii).sum())


def recovered_overlap(distance, r_u, r_v):
    """Overlap angle of two circles whose centers are ``distance`` apart.

    Separated circles (no intersection) clamp to 0.
    """
    cos_theta = (distance * distance - r_u * r_u - r_v * r_v) / (2.0 * r_u * r_v)
    return np.arccos(np.clip(cos_theta, -1.0, 1.0))

