"""End-to-end solve: radii first, then centers, then diagnostics."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .center_solver import (
    Layout,
    edge_length_mismatch,
    harmonic_residual,
    layout,
    layout_boundary,
    realized_overlaps,
)
from .geometry import PatternGeometry, RadiusState
from .mesh import PatternWeights, Triangulation
from .radius_solver import RadiusSolveConfig, RadiusSolveReport, _gradient, solve_radii


@dataclass(frozen=True)
class CenterSolveConfig:
    tolerance: float = 1e-12
    max_iterations: int | None = None
    precondition: str | None = None


@dataclass
class Solution:
    radii: np.ndarray
    radius_report: RadiusSolveReport
    layout: Layout | None = None
    wall_time: float = 0.0

    @property
    def centers(self) -> np.ndarray | None:
        return None if self.layout is None else self.layout.centers


def radius_diagnostics(t: Triangulation, w: PatternWeights, radii: np.ndarray) -> dict:
    geo = PatternGeometry(t, w)
    u = np.log(radii)
    k = geo.curvature(u)
    grad = _gradient(geo.stiffness(u), k)
    return {
        "gradient_norm": float(np.linalg.norm(grad)),
        "max_curvature": float(np.max(np.abs(k))),
        "energy": float(k @ k),
    }


def compute_diagnostics(t: Triangulation, w: PatternWeights, radii: np.ndarray, centers: np.ndarray) -> dict:
    """Every residual that can be recomputed from the radii and centers alone."""
    radii = np.asarray(radii, dtype=float)
    centers = np.asarray(centers, dtype=float)
    c = PatternGeometry(t, w).stiffness(np.log(radii))
    diag = radius_diagnostics(t, w, radii)
    diag["closure_error"] = layout_boundary(t, w, radii).closure_error
    diag["harmonic_residual"] = harmonic_residual(t, c, centers)
    diag["max_edge_mismatch"] = float(np.max(edge_length_mismatch(t, w, radii, centers)))
    diag["max_overlap_error"] = float(np.max(np.abs(realized_overlaps(t, radii, centers) - w.overlap)))
    return diag


def solve(
    t: Triangulation,
    w: PatternWeights,
    initial_radii: np.ndarray | None = None,
    radius_cfg: RadiusSolveConfig | None = None,
    center_cfg: CenterSolveConfig | None = None,
) -> Solution:
    """Radius stage, then (only if it converged) the center stage.

    Center-stage failures propagate as ``CgStalled`` or ``SingularSystem``.
    """
    center_cfg = center_cfg or CenterSolveConfig()
    start = time.perf_counter()
    initial = None if initial_radii is None else RadiusState.from_radii(initial_radii)
    state, report = solve_radii(t, w, initial, radius_cfg)
    sol = Solution(radii=state.radii, radius_report=report)
    if report.converged:
        sol.layout = layout(
            t,
            w,
            sol.radii,
            tol=center_cfg.tolerance,
            max_iterations=center_cfg.max_iterations,
            precondition=center_cfg.precondition,
        )
    sol.wall_time = time.perf_counter() - start
    return sol
