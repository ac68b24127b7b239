import numpy as np
import pytest
from scipy import sparse

from circle_patterns.cg import conjugate_gradient
from circle_patterns.errors import CgStalled


def test_identity_one_iteration():
    b = np.array([3.0, -1.0, 2.5])
    st = conjugate_gradient(np.eye(3), b)
    assert st.iterations == 1
    assert np.allclose(st.solution, b, atol=1e-15)


def test_two_by_two():
    st = conjugate_gradient(np.array([[2.0, -1.0], [-1.0, 2.0]]), np.array([1.0, 1.0]), x0=np.zeros(2))
    assert np.allclose(st.solution, [1.0, 1.0], atol=1e-14)


def test_start_vector_defaults_to_ones():
    a = np.array([[2.0, -1.0], [-1.0, 2.0]])
    # All-ones already solves a @ x = (1, 1).
    st = conjugate_gradient(a, a @ np.ones(2))
    assert st.iterations == 0 and st.converged


def test_random_spd_and_callable(rng):
    n = 40
    m = rng.normal(size=(n, n))
    a = m @ m.T + n * np.eye(n)
    b = rng.normal(size=n)
    direct = np.linalg.solve(a, b)
    for op in (a, sparse.csr_matrix(a), lambda x: a @ x):
        st = conjugate_gradient(op, b, tol=1e-10)
        assert np.allclose(st.solution, direct, atol=1e-10)
        assert np.linalg.norm(b - a @ st.solution) < 1e-10
        assert len(st.step_lengths) == st.iterations


def test_jacobi_preconditioner_reduces_iterations(rng):
    n = 60
    scales = np.logspace(0, 4, n)
    m = rng.normal(size=(n, n)) * 0.01
    a = np.diag(scales) + m @ m.T
    b = rng.normal(size=n)
    plain = conjugate_gradient(a, b, tol=1e-8, max_iterations=1000)
    jac = conjugate_gradient(a, b, tol=1e-8, max_iterations=1000, preconditioner=1 / np.diag(a))
    assert jac.iterations < plain.iterations


def test_stall_raises_with_state(rng):
    n = 30
    m = rng.normal(size=(n, n))
    a = m @ m.T + np.eye(n)
    with pytest.raises(CgStalled) as info:
        conjugate_gradient(a, rng.normal(size=n), max_iterations=2)
    assert info.value.result.iterations == 2
    st = conjugate_gradient(a, rng.normal(size=n), max_iterations=2, raise_on_stall=False)
    assert not st.converged
