"""Conjugate gradient for symmetric positive definite systems."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import CgStalled


@dataclass
class CgState:
    """Iterate, residual and search direction, plus the step length taken at
    every iteration."""

    solution: np.ndarray
    residual: np.ndarray
    direction: np.ndarray
    step_lengths: list[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False

    @property
    def residual_norm(self) -> float:
        return float(np.linalg.norm(self.residual))


def _as_operator(a) -> Callable[[np.ndarray], np.ndarray]:
    if callable(a):
        return a
    return lambda x: a @ x


def conjugate_gradient(
    a,
    b: np.ndarray,
    x0: np.ndarray | None = None,
    tol: float = 1e-12,
    max_iterations: int | None = None,
    preconditioner: np.ndarray | None = None,
    raise_on_stall: bool = True,
) -> CgState:
    """Solve ``a @ x = b`` for SPD ``a`` (matrix, sparse matrix or callable).

    The start vector defaults to all ones.  Iteration stops once the true
    residual ``b - a @ x`` has 2-norm below ``tol``.  ``preconditioner`` is an
    array of inverse diagonal entries (Jacobi).
    """
    matvec = _as_operator(a)
    b = np.asarray(b, dtype=float)
    n = len(b)
    if max_iterations is None:
        max_iterations = max(10 * n, 1)
    x = np.ones(n) if x0 is None else np.array(x0, dtype=float)
    m_inv = np.ones(n) if preconditioner is None else np.asarray(preconditioner, dtype=float)

    r = b - matvec(x)
    state = CgState(solution=x, residual=r, direction=np.zeros(n))
    if np.linalg.norm(r) < tol:
        state.converged = True
        return state

    z = m_inv * r
    p = z.copy()
    rz = r @ z
    k = 0
    while k < max_iterations:
        ap = matvec(p)
        curv = p @ ap
        if curv <= 0.0:
            break
        alpha = rz / curv
        x = x + alpha * p
        r = r - alpha * ap
        k += 1
        state.step_lengths.append(float(alpha))
        if np.linalg.norm(r) < tol:
            # Recursive residual drifts; confirm against the true one and restart if needed.
            r = b - matvec(x)
            if np.linalg.norm(r) < tol:
                state.converged = True
                break
            z = m_inv * r
            p = z.copy()
            rz = r @ z
            continue
        z = m_inv * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new

    state.solution = x
    state.residual = b - matvec(x)
    state.direction = p
    state.iterations = k
    state.converged = state.converged or state.residual_norm < tol
    if not state.converged and raise_on_stall:
        raise CgStalled(
            f"conjugate gradient stopped after {k} iterations with residual {state.residual_norm:.3e} >= {tol:.1e}",
            result=state,
        )
    return state
