"""Circle centers from solved radii.

Boundary centers are laid out by walking the boundary cycle with the
prescribed corner angles.  Interior centers minimise the stiffness-weighted
Dirichlet energy with the boundary held fixed, one conjugate-gradient solve
per coordinate axis.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .cg import CgState, conjugate_gradient
from .errors import SingularSystem
from .geometry import PatternGeometry, StiffnessMatrix, edge_length, recovered_overlap
from .mesh import PatternWeights, Triangulation


@dataclass(frozen=True)
class BoundaryLayout:
    centers: np.ndarray  # (n, 2); rows of interior vertices are NaN
    closure_error: float


@dataclass(frozen=True)
class Layout:
    centers: np.ndarray
    closure_error: float
    harmonic_residual: float
    cg_iterations: tuple[int, int] = (0, 0)

    @property
    def complex_centers(self) -> np.ndarray:
        return self.centers[:, 0] + 1j * self.centers[:, 1]


@dataclass(frozen=True)
class InteriorSystem:
    matrix: sparse.csr_matrix
    rhs: np.ndarray  # (n_interior, 2)
    interior: np.ndarray  # vertex index of each unknown

    @property
    def size(self) -> int:
        return len(self.interior)


def next_boundary_center(z_u: complex, z_v: complex, length: float, angle: float) -> complex:
    """Center of ``w`` given consecutive boundary centers ``u``, ``v``.

    The edge ``vw`` leaves ``v`` at interior angle ``angle`` from ``vu``,
    turning clockwise from ``vu`` so that the interior stays on the left of a
    counterclockwise traversal.
    """
    back = z_u - z_v
    return z_v + length * (back / abs(back)) * cmath.exp(-1j * angle)


def layout_boundary(t: Triangulation, w: PatternWeights, radii: np.ndarray) -> BoundaryLayout:
    """Place boundary centers, pinning the first at the origin and the second on
    the positive x-axis.

    The walk goes once around the cycle; ``closure_error`` is how far the
    final step lands from the origin.
    """
    radii = np.asarray(radii, dtype=float)
    cyc = t.boundary_cycle
    m = len(cyc)

    def length(a, b):
        return float(edge_length(radii[a], radii[b], w.overlap_between(t, a, b)))

    z = [0j, complex(length(cyc[0], cyc[1]), 0.0)]
    for i in range(1, m):
        u, v, nxt = cyc[i - 1], cyc[i], cyc[(i + 1) % m]
        z.append(next_boundary_center(z[i - 1], z[i], length(v, nxt), w.boundary_angle[v]))

    centers = np.full((t.vertex_count, 2), np.nan)
    for v, zv in zip(cyc, z[:m]):
        centers[v] = (zv.real, zv.imag)
    return BoundaryLayout(centers=centers, closure_error=abs(z[m] - z[0]))


def dirichlet_energy(t: Triangulation, c: StiffnessMatrix, centers: np.ndarray) -> float:
    d = centers[t.edges[:, 0]] - centers[t.edges[:, 1]]
    return float(c.off_diagonal @ np.einsum("ij,ij->i", d, d))


def assemble_interior_system(t: Triangulation, c: StiffnessMatrix, boundary_centers: np.ndarray) -> InteriorSystem:
    """Normal equations of the Dirichlet energy in the interior centers.

    Row ``v``: ``sum_u c_uv`` on the diagonal, ``-c_uv`` against interior
    neighbours ``u``; boundary neighbours move to the right-hand side.
    """
    interior = np.asarray(t.interior_vertices, dtype=np.intp)
    slot = np.full(t.vertex_count, -1, dtype=np.intp)
    slot[interior] = np.arange(len(interior))

    a, b = t.edges[:, 0], t.edges[:, 1]
    weight = c.off_diagonal
    degree = np.bincount(a, weights=weight, minlength=t.vertex_count) + np.bincount(
        b, weights=weight, minlength=t.vertex_count
    )
    if len(interior) and np.any(degree[interior] <= 0.0):
        bad = interior[degree[interior] <= 0.0]
        raise SingularSystem(f"interior vertices {bad.tolist()} have non-positive total edge weight")

    rows, cols, vals = [slot[interior]], [slot[interior]], [degree[interior]]
    rhs = np.zeros((len(interior), 2))
    sa, sb = slot[a], slot[b]
    both = (sa >= 0) & (sb >= 0)
    rows += [sa[both], sb[both]]
    cols += [sb[both], sa[both]]
    vals += [-weight[both], -weight[both]]
    for s_in, other in ((sa, b), (sb, a)):
        mixed = (s_in >= 0) & (slot[other] < 0)
        np.add.at(rhs, s_in[mixed], weight[mixed, None] * boundary_centers[other[mixed]])

    n = len(interior)
    matrix = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    return InteriorSystem(matrix=matrix, rhs=rhs, interior=interior)


def solve_centers_cg(
    system: InteriorSystem,
    tol: float = 1e-12,
    max_iterations: int | None = None,
    precondition: str | None = None,
    start: np.ndarray | None = None,
) -> tuple[np.ndarray, tuple[CgState, CgState]]:
    """Solve the x and y systems independently, each from ``start`` (all ones
    by default)."""
    if max_iterations is None:
        max_iterations = 10 * max(system.size, 1)
    m_inv = None
    if precondition == "jacobi":
        m_inv = 1.0 / system.matrix.diagonal()
    elif precondition is not None:
        raise ValueError(f"unknown preconditioner {precondition!r}")
    out = np.empty((system.size, 2))
    states = []
    for axis in range(2):
        x0 = None if start is None else np.asarray(start)[:, axis]
        st = conjugate_gradient(
            system.matrix, system.rhs[:, axis], x0=x0, tol=tol, max_iterations=max_iterations, preconditioner=m_inv
        )
        out[:, axis] = st.solution
        states.append(st)
    return out, (states[0], states[1])


def harmonic_residual(t: Triangulation, c: StiffnessMatrix, centers: np.ndarray) -> float:
    """Largest norm of ``sum_u c_uv (z_u - z_v)`` over interior vertices."""
    if not t.interior_vertices:
        return 0.0
    lap = c.apply(centers)
    return float(np.max(np.linalg.norm(lap[list(t.interior_vertices)], axis=1)))


def layout(
    t: Triangulation,
    w: PatternWeights,
    radii: np.ndarray,
    tol: float = 1e-12,
    max_iterations: int | None = None,
    precondition: str | None = None,
    start: np.ndarray | None = None,
) -> Layout:
    radii = np.asarray(radii, dtype=float)
    boundary = layout_boundary(t, w, radii)
    c = PatternGeometry(t, w).stiffness(np.log(radii))
    centers = boundary.centers.copy()
    iterations = (0, 0)
    if t.interior_vertices:
        system = assemble_interior_system(t, c, boundary.centers)
        interior_xy, states = solve_centers_cg(
            system, tol=tol, max_iterations=max_iterations, precondition=precondition, start=start
        )
        centers[system.interior] = interior_xy
        iterations = (states[0].iterations, states[1].iterations)
    return Layout(
        centers=centers,
        closure_error=boundary.closure_error,
        harmonic_residual=harmonic_residual(t, c, centers),
        cg_iterations=iterations,
    )


def edge_length_mismatch(t: Triangulation, w: PatternWeights, radii: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Relative error ``| |z_u - z_v| - l_uv | / l_uv`` per edge."""
    a, b = t.edges[:, 0], t.edges[:, 1]
    target = edge_length(radii[a], radii[b], w.overlap)
    actual = np.linalg.norm(centers[a] - centers[b], axis=1)
    return np.abs(actual - target) / target


def realized_overlaps(t: Triangulation, radii: np.ndarray, centers: np.ndarray) -> np.ndarray:
    a, b = t.edges[:, 0], t.edges[:, 1]
    dist = np.linalg.norm(centers[a] - centers[b], axis=1)
    return recovered_overlap(dist, radii[a], radii[b])
