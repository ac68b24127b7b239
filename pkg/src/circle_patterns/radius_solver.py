"""Radii that flatten the cone metric: minimise the sum of squared curvatures.

Two modes share one driver loop.  ``gradient_descent`` takes fixed steps of
size ``step_size`` along ``-grad E`` and halves the step whenever the energy
would not decrease or a face would degenerate.  ``levenberg_marquardt`` takes
damped Gauss-Newton steps on the residual vector ``K``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .cg import conjugate_gradient
from .errors import DegenerateInitialState, DegenerateTriangle
from .geometry import PatternGeometry, RadiusState, StiffnessMatrix
from .mesh import PatternWeights, Triangulation

log = logging.getLogger(__name__)

MAX_HALVINGS = 30
LM_MAX_RETRIES = 30
LM_DAMPING_MIN = 1e-15
LM_DAMPING_MAX = 1e15


@dataclass(frozen=True)
class RadiusSolveConfig:
    step_size: float = 0.1
    tolerance: float = 1e-9
    max_iterations: int = 100_000
    mode: Literal["gradient_descent", "levenberg_marquardt"] = "gradient_descent"
    lm_damping_init: float = 1e-3
    # Take the literal step r <- r - eta * dE/dr instead of working in log r.
    radius_space: bool = False
    record_trace: bool = False

    def __post_init__(self):
        if not self.step_size > 0:
            raise ValueError(f"step_size must be positive, got {self.step_size}")
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.mode not in ("gradient_descent", "levenberg_marquardt"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not self.lm_damping_init > 0:
            raise ValueError(f"lm_damping_init must be positive, got {self.lm_damping_init}")


@dataclass(frozen=True)
class RadiusSolveReport:
    iterations: int
    gradient_norm: float
    max_curvature: float
    energy: float
    converged: bool
    stalled: bool = False
    energy_trace: tuple[float, ...] = field(default=(), repr=False)


def energy(t: Triangulation, w: PatternWeights, state: RadiusState) -> float:
    k = PatternGeometry(t, w).curvature(state.log_radii)
    state.curvatures = k
    state.energy = float(k @ k)
    return state.energy


def _gradient(jac: StiffnessMatrix, k: np.ndarray) -> np.ndarray:
    # J is symmetric, so J^T K = J K.
    return 2.0 * jac.apply(k)


def energy_gradient(t: Triangulation, w: PatternWeights, state: RadiusState) -> np.ndarray:
    """Gradient of the energy with respect to the log-radii."""
    geo = PatternGeometry(t, w)
    k = geo.curvature(state.log_radii)
    return _gradient(geo.stiffness(state.log_radii), k)


class _Problem:
    """Curvature and energy evaluation with degeneracy turned into ``None``."""

    def __init__(self, geo: PatternGeometry):
        self.geo = geo

    def curvature_or_none(self, u: np.ndarray) -> np.ndarray | None:
        if not np.all(np.isfinite(u)):
            return None
        try:
            return self.geo.curvature(u)
        except DegenerateTriangle:
            return None


def solve_radii(
    t: Triangulation,
    w: PatternWeights,
    initial: RadiusState | None = None,
    cfg: RadiusSolveConfig | None = None,
) -> tuple[RadiusState, RadiusSolveReport]:
    """Run the radius stage to ``||grad E|| < cfg.tolerance``.

    Hitting ``max_iterations`` is not an error: the report comes back with
    ``converged=False`` alongside the last accepted state.
    """
    cfg = cfg or RadiusSolveConfig()
    geo = PatternGeometry(t, w)
    problem = _Problem(geo)
    u = np.zeros(t.vertex_count) if initial is None else np.array(initial.log_radii, dtype=float)
    k = problem.curvature_or_none(u)
    if k is None:
        raise DegenerateInitialState("initial radii give a face whose side lengths violate the triangle inequality")
    e = float(k @ k)
    trace = [e] if cfg.record_trace else []

    step = _lm_step if cfg.mode == "levenberg_marquardt" else _gd_step
    damping = [cfg.lm_damping_init]
    iterations = 0
    stalled = False
    jac = geo.stiffness(u)
    grad = _gradient(jac, k)
    while np.linalg.norm(grad) >= cfg.tolerance and iterations < cfg.max_iterations:
        accepted = step(problem, cfg, u, k, e, jac, grad, damping)
        if accepted is None:
            stalled = True
            log.warning("radius stage stalled at iteration %d, energy %.3e", iterations, e)
            break
        u, k, e = accepted
        iterations += 1
        if cfg.record_trace:
            trace.append(e)
        jac = geo.stiffness(u)
        grad = _gradient(jac, k)

    gnorm = float(np.linalg.norm(grad))
    state = RadiusState(log_radii=u, curvatures=k, energy=e)
    report = RadiusSolveReport(
        iterations=iterations,
        gradient_norm=gnorm,
        max_curvature=float(np.max(np.abs(k))),
        energy=e,
        converged=gnorm < cfg.tolerance,
        stalled=stalled,
        energy_trace=tuple(trace),
    )
    return state, report


def _gd_step(problem, cfg, u, k, e, jac, grad, damping):
    eta = cfg.step_size
    if cfg.radius_space:
        r = np.exp(u)
        grad_r = grad / r
    for _ in range(MAX_HALVINGS + 1):
        if cfg.radius_space:
            r_new = r - eta * grad_r
            trial = np.log(r_new) if np.all(r_new > 0) else None
        else:
            trial = u - eta * grad
        k_new = None if trial is None else problem.curvature_or_none(trial)
        if k_new is not None:
            e_new = float(k_new @ k_new)
            if e_new < e:
                return trial, k_new, e_new
        eta *= 0.5
    return None


def _lm_step(problem, cfg, u, k, e, jac, grad, damping):
    """Solve (J^T J + lambda I) delta = -J^T K by CG; adapt lambda by 10x."""
    j = jac.to_sparse()
    rhs = -0.5 * grad
    n = len(u)
    for _ in range(LM_MAX_RETRIES):
        lam = damping[0]
        cg = conjugate_gradient(
            lambda x: j @ (j @ x) + lam * x,
            rhs,
            x0=np.zeros(n),
            tol=max(1e-13 * np.linalg.norm(rhs), 1e-300),
            max_iterations=20 * n,
            raise_on_stall=False,
        )
        trial = u + cg.solution
        k_new = problem.curvature_or_none(trial)
        if k_new is not None:
            e_new = float(k_new @ k_new)
            if e_new < e:
                damping[0] = max(lam / 10.0, LM_DAMPING_MIN)
                return trial, k_new, e_new
        damping[0] = min(lam * 10.0, LM_DAMPING_MAX)
    return None
