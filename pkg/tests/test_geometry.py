import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circle_patterns.errors import DegenerateTriangle
from circle_patterns.geometry import (
    PatternGeometry,
    RadiusState,
    curvature,
    edge_length,
    intersection_coefficient,
    stiffness,
    total_angle,
    triangle_angles,
    triangle_area,
)
from circle_patterns.mesh import build_triangulation, generate_hex_disk, make_weights

from conftest import random_problem


def fd_jacobian(geo, u, h=1e-6):
    cols = []
    for i in range(len(u)):
        e = np.zeros_like(u)
        e[i] = h
        cols.append((geo.curvature(u + e) - geo.curvature(u - e)) / (2 * h))
    return np.column_stack(cols)


@pytest.mark.parametrize(
    "ru, rv, theta, expected",
    [(1, 1, 0, 2.0), (3, 4, math.pi / 2, 5.0), (1, 2, math.pi / 3, math.sqrt(7))],
)
def test_edge_length(ru, rv, theta, expected):
    assert edge_length(ru, rv, theta) == pytest.approx(expected, rel=1e-14)


@given(
    st.floats(1e-3, 1e3),
    st.floats(1e-3, 1e3),
    st.floats(0, 3.1),
)
def test_edge_length_bounds(ru, rv, theta):
    length = edge_length(ru, rv, theta)
    assert length > 0
    assert length >= abs(ru - rv) * (1 - 1e-12)
    assert length <= (ru + rv) * (1 + 1e-12)


@pytest.mark.parametrize(
    "angles, expected",
    [((0, 0, 0), 2.0), ((math.pi / 2, 0, 0), 1.0), ((2 * math.pi / 3, math.pi / 3, math.pi / 3), -0.25)],
)
def test_intersection_coefficient(angles, expected):
    assert intersection_coefficient(*angles) == pytest.approx(expected, abs=1e-15)


def test_triangle_angles():
    assert triangle_angles(1, 1, 1) == pytest.approx((math.pi / 3,) * 3, abs=1e-15)
    a, b, c = triangle_angles(3, 4, 5)
    assert c == pytest.approx(math.pi / 2, abs=1e-15)
    assert a + b + c == pytest.approx(math.pi, abs=1e-12)
    with pytest.raises(DegenerateTriangle):
        triangle_angles(1, 1, 2.5)


@given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.05, 0.95))
def test_triangle_angles_sum_to_pi(a, b, frac):
    lo, hi = abs(a - b), a + b
    c = lo + frac * (hi - lo)
    assert sum(triangle_angles(a, b, c)) == pytest.approx(math.pi, abs=1e-12)


def test_triangle_area():
    assert triangle_area(3, 4, 5) == pytest.approx(6.0, rel=1e-15)
    assert triangle_area(2, 2, 2) == pytest.approx(math.sqrt(3), rel=1e-15)
    with pytest.raises(DegenerateTriangle):
        triangle_area(1, 1, 2.5)


def test_needle_triangle_area_against_high_precision():
    mpmath.mp.dps = 50
    a, b, c = (mpmath.mpf(x) for x in ("1", "1", "1.999"))
    s = (a + b + c) / 2
    oracle = float(mpmath.sqrt(s * (s - a) * (s - b) * (s - c)))
    area = triangle_area(1.0, 1.0, 1.999)
    assert area > 0
    assert area == pytest.approx(oracle, rel=1e-12)


def test_hex_disk_equal_radii_is_flat(hex1):
    t, w = hex1
    state = RadiusState(np.zeros(t.vertex_count))
    k = curvature(t, w, state)
    assert np.max(np.abs(k)) < 1e-14
    assert state.energy == pytest.approx(float(k @ k))


def test_degree_five_interior_vertex():
    faces = [(0, i, i % 5 + 1) for i in range(1, 6)]
    t = build_triangulation(faces, 6)
    w = make_weights(t, boundary_angle={v: 3 * math.pi / 5 for v in range(1, 6)})
    k = curvature(t, w, RadiusState(np.zeros(6)))
    assert k[0] == pytest.approx(-math.pi / 3, abs=1e-14)


def test_boundary_vertex_single_equilateral_face():
    t = build_triangulation([(0, 1, 2)], 3)
    w = make_weights(t, boundary_angle={0: math.pi / 2, 1: math.pi / 4, 2: math.pi / 4})
    k = curvature(t, w, RadiusState(np.zeros(3)))
    assert k[0] == pytest.approx(math.pi / 3 - math.pi / 2, abs=1e-14)


def test_degenerate_face_identified():
    t = build_triangulation([(0, 1, 2), (0, 2, 3)], 4)
    w = make_weights(t, {(0, 1): 3.0, (1, 2): 3.0}, {v: math.pi / 2 for v in range(4)})
    # With overlaps near pi and a tiny circle 1, l01 + l12 < l02.
    with pytest.raises(DegenerateTriangle) as info:
        PatternGeometry(t, w).curvature(np.array([0.0, -3.0, 0.0, 0.0]))
    assert info.value.face == 0


def test_equilateral_tangent_stiffness(hex1):
    # Finite differences give 1/(2*sqrt(3)) per face (see oracle below); an
    # interior edge of the flat hex disk lies in two such faces.
    t, w = hex1
    geo = PatternGeometry(t, w)
    u = np.zeros(t.vertex_count)
    fd = fd_jacobian(geo, u)
    per_face = 1 / (2 * math.sqrt(3))
    spoke = t.edge_index(0, t.boundary_cycle[0])
    rim = t.edge_index(*t.boundary_cycle[:2])
    c = geo.stiffness(u).off_diagonal
    assert c[spoke] == pytest.approx(2 * per_face, rel=1e-12)
    assert c[rim] == pytest.approx(per_face, rel=1e-12)
    assert fd[0, t.boundary_cycle[0]] == pytest.approx(2 * per_face, rel=1e-8)
    assert np.all(c > 0)


def test_stiffness_independent_of_face_order(rng):
    faces = [(0, 1, 2), (0, 2, 3), (0, 3, 4)]
    u = rng.uniform(-0.3, 0.3, 5)
    results = []
    for order in (faces, faces[::-1]):
        t = build_triangulation(order, 5)
        w = make_weights(t, {(0, 2): 0.4, (0, 3): 1.0})
        results.append(PatternGeometry(t, w).stiffness(u).off_diagonal)
    assert np.allclose(results[0], results[1], rtol=0, atol=1e-15)


def test_jacobian_matches_finite_differences(rng):
    for _ in range(10):
        t, w = random_problem(rng)
        geo = PatternGeometry(t, w)
        u = rng.uniform(-0.7, 0.7, t.vertex_count)
        jac = geo.stiffness(u)
        fd = fd_jacobian(geo, u)
        dense = jac.to_dense()
        assert np.allclose(dense, dense.T, rtol=0, atol=0)
        scale = np.abs(dense).max()
        assert np.max(np.abs(dense - fd)) < 1e-6 * scale
        # Row sums vanish exactly by construction and agree with the FD diagonal.
        assert np.allclose(jac.diagonal, np.diag(fd), rtol=1e-6, atol=1e-9)
        assert np.all(jac.off_diagonal >= 0)


def test_stiffness_apply_matches_matrix(rng):
    t, w = random_problem(rng)
    jac = PatternGeometry(t, w).stiffness(rng.normal(size=t.vertex_count) * 0.3)
    x = rng.normal(size=(t.vertex_count, 2))
    assert np.allclose(jac.apply(x), jac.to_dense() @ x, atol=1e-13)
    assert np.allclose(jac.apply(np.ones(t.vertex_count)), 0, atol=1e-13)


def test_scale_invariance(rng):
    for _ in range(10):
        t, w = random_problem(rng)
        state = RadiusState(rng.uniform(-1, 1, t.vertex_count))
        k = curvature(t, w, state)
        for lam in (1e-3, 1.0, 1e3):
            scaled = RadiusState(state.log_radii + math.log(lam))
            assert np.max(np.abs(curvature(t, w, scaled) - k)) < 1e-10


def test_total_angle_identity(rng):
    for _ in range(10):
        t, w = random_problem(rng)
        state = RadiusState(rng.uniform(-1, 1, t.vertex_count))
        assert abs(total_angle(t, w, state) - math.pi * t.face_count) < 1e-10
        k = curvature(t, w, state)
        expected = math.pi * t.face_count - 2 * math.pi * len(t.interior_vertices) - sum(w.boundary_angle.values())
        assert k.sum() == pytest.approx(expected, abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=7, max_size=7))
def test_stiffness_nonnegative_on_tangent_hex(log_radii):
    t, w = generate_hex_disk(1)
    c = stiffness(t, w, RadiusState(np.array(log_radii)))
    assert np.all(c.off_diagonal > 0)
    assert np.allclose(c.diagonal + np.bincount(t.edges.ravel(), np.repeat(c.off_diagonal, 2), 7), 0, atol=1e-13)
