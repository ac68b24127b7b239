import math
import sys

import numpy as np
import pytest
from scipy.spatial import Delaunay

from circle_patterns.mesh import build_triangulation, generate_hex_disk, make_weights

QUAD_FACES = [(0, 1, 2), (0, 2, 3)]


def quad_mesh():
    t = build_triangulation(QUAD_FACES, 4)
    return t, make_weights(t, boundary_angle={v: math.pi / 2 for v in range(4)})


def delaunay_disk(n_points, rng):
    """Delaunay triangulation of random points in the unit disk, faces CCW."""
    angle = rng.uniform(0, 2 * math.pi, n_points)
    rad = np.sqrt(rng.uniform(0, 1, n_points))
    pts = np.column_stack([rad * np.cos(angle), rad * np.sin(angle)])
    tri = Delaunay(pts)
    faces = []
    for a, b, c in tri.simplices:
        pa, pb, pc = pts[a], pts[b], pts[c]
        cross = (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pb[1] - pa[1]) * (pc[0] - pa[0])
        faces.append((int(a), int(b), int(c)) if cross > 0 else (int(a), int(c), int(b)))
    return build_triangulation(faces, n_points)


def random_weights(t, rng, max_overlap=math.pi / 2):
    """Overlaps in [0, max_overlap] (cosines >= 0 keep every I >= 0 when
    max_overlap <= pi/2) and regular-polygon boundary angles."""
    overlap = {tuple(int(x) for x in e): float(rng.uniform(0, max_overlap)) for e in t.edges}
    m = len(t.boundary_cycle)
    corner = math.pi - 2 * math.pi / m
    return make_weights(t, overlap, {v: corner for v in t.boundary_cycle})


def random_problem(rng):
    kind = rng.integers(3)
    if kind == 0:
        t, _ = generate_hex_disk(int(rng.integers(1, 4)))
    elif kind == 1:
        t, _ = quad_mesh()
    else:
        t = delaunay_disk(int(rng.integers(6, 30)), rng)
    return t, random_weights(t, rng)


def obtuse_hex_disk(theta=3 * math.pi / 5):
    """Hex disk of two rings with ``theta`` on a face-disjoint set of interior
    edges, so every face carries at most one obtuse edge."""
    t, base = generate_hex_disk(2)
    used_faces: set[int] = set()
    obtuse = {}
    for e, faces in enumerate(t.edge_faces):
        if len(faces) == 2 and not used_faces & set(faces):
            used_faces |= set(faces)
            obtuse[tuple(int(x) for x in t.edges[e])] = theta
    return t, make_weights(t, obtuse, base.boundary_angle)


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


@pytest.fixture
def hex1():
    return generate_hex_disk(1)


@pytest.fixture
def hex2():
    return generate_hex_disk(2)


@pytest.fixture
def quad():
    return quad_mesh()


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
