"""Structure tests for ball-polyhedron construction, reduction, and duality."""
from __future__ import annotations

import numpy as np
import pytest

from ballrigid import (
    CenterSet,
    build,
    dual,
    has_interior,
    is_simple,
    is_standard,
    reduce_centers,
)
from ballrigid.ballpoly import face_interior_point
from ballrigid.errors import (
    ConsistencyError,
    DegenerateConfigurationError,
    DualityError,
    EmptyInteriorError,
)

from conftest import TETRA_POINTS


# ---------------------------------------------------------------------------
# interior / reduction


def test_has_interior_tetra(tetra_centers):
    assert has_interior(tetra_centers)


def test_no_interior_when_balls_touch():
    cs = CenterSet(np.array([[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]]))
    assert not has_interior(cs)
    with pytest.raises(EmptyInteriorError):
        reduce_centers(cs)


def test_no_interior_when_disjoint():
    cs = CenterSet(np.array([[0.0, 0.0, 0.0], [2.5, 0.0, 0.0]]))
    assert not has_interior(cs)


def test_reduce_keeps_tetra(tetra_centers):
    reduced = reduce_centers(tetra_centers)
    assert len(reduced) == 4
    assert reduced.labels == tetra_centers.labels


def test_reduce_drops_centroid():
    # A center sitting at the centroid of four others is redundant: every
    # point of the remaining intersection is within distance 1 of it by
    # convexity of the norm. Verify that numerically before trusting reduce.
    base = np.array(
        [
            [0.0, 0.0, 0.0],
            [0.1, 0.0, 0.0],
            [0.0, 0.1, 0.0],
            [0.0, 0.0, 0.1],
        ]
    )
    centroid = base.mean(axis=0)
    rng = np.random.default_rng(47)
    for _ in range(2000):
        v = rng.normal(size=3)
        v /= np.linalg.norm(v)
        # walk to the boundary of the intersection of the four unit balls
        lo, hi = 0.0, 2.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            p = base[0] + mid * v
            if max(np.linalg.norm(p - c) for c in base) <= 1.0:
                lo = mid
            else:
                hi = mid
        p = base[0] + lo * v
        assert np.linalg.norm(p - centroid) <= 1.0 + 1e-9

    cs = CenterSet(np.vstack([base, centroid[None, :]]))
    reduced = reduce_centers(cs)
    assert len(reduced) == 4
    assert reduced.labels == cs.labels[:4]


def test_reduce_keeps_all_of_two_ball_lens():
    cs = CenterSet(np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]))
    reduced = reduce_centers(cs)
    assert len(reduced) == 2


def test_reduce_drops_midpoint_of_lens():
    # the midpoint ball contains the whole lens, so it contributes no face
    cs = CenterSet(
        np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, 0.0, 0.0]])
    )
    reduced = reduce_centers(cs)
    assert len(reduced) == 2
    assert reduced.labels == ("c1", "c2")


def test_reduce_flags_tangential_center():
    # Lens of the first two balls has its rim circle at x = 0.5 with radius
    # sqrt(3)/2. A probe at (0.5, 1 - sqrt(3)/2, 0) sees the opposite rim
    # point (0.5, -sqrt(3)/2, 0) at distance exactly 1: the probe's sphere
    # touches the lens without cutting a 2-dimensional face out of it.
    a = np.array([0.0, 0.0, 0.0])
    b = np.array([1.0, 0.0, 0.0])
    probe = np.array([0.5, 1.0 - np.sqrt(3.0) / 2.0, 0.0])
    cs = CenterSet(np.vstack([a, b, probe]))
    with pytest.raises(DegenerateConfigurationError):
        reduce_centers(cs)


def test_face_witness_is_interior(tetra_centers):
    reduced = reduce_centers(tetra_centers)
    pts = reduced.points
    for i in range(len(reduced)):
        z = face_interior_point(reduced, i)
        assert abs(np.linalg.norm(z - pts[i]) - 1.0) < 1e-9
        for j in range(len(reduced)):
            if j != i:
                assert np.linalg.norm(z - pts[j]) < 1.0 - 1e-9


# ---------------------------------------------------------------------------
# tetrahedron structure

# Each center of the unit regular tetrahedron lies at distance 1 from the
# other three, so the centers themselves are the vertices of the body.


def test_tetra_f_vector(tetra_poly):
    assert tetra_poly.f_vector == (4, 6, 4)


def test_tetra_vertices_are_the_centers(tetra_poly, tetra_centers):
    got = sorted(tuple(np.round(v.position, 9)) for v in tetra_poly.vertices)
    want = sorted(tuple(np.round(c, 9)) for c in tetra_centers.points)
    assert got == want


def test_tetra_vertex_labels(tetra_poly):
    # the vertex at center c_i is cut out by the three other spheres
    for v in tetra_poly.vertices:
        assert len(v.labels) == 3


def test_tetra_is_simple_and_standard(tetra_poly):
    assert is_simple(tetra_poly)
    assert is_standard(tetra_poly)


def test_tetra_edges_join_faces(tetra_poly):
    for e_id, e in enumerate(tetra_poly.edges):
        assert not e.full
        fa, fb = tetra_poly.edge_faces(e_id)
        centers_of_faces = sorted(
            (tetra_poly.faces[fa].center_index, tetra_poly.faces[fb].center_index)
        )
        assert centers_of_faces == sorted(e.pair)


def test_euler_formula_tetra(tetra_poly):
    v, e, f = tetra_poly.f_vector
    assert v - e + f == 2


def test_single_ball_has_one_face():
    poly = build(CenterSet(np.zeros((1, 3))))
    assert poly.f_vector == (0, 0, 1)
    assert not is_standard(poly)


def test_lens_is_not_standard():
    poly = build(CenterSet(np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])))
    v, e, f = poly.f_vector
    assert (v, f) == (0, 2)
    assert poly.edges[0].full
    assert not is_standard(poly)


def test_concyclic_square_not_simple():
    # four centers on a circle: the two points on the axis lie on all four
    # spheres at once, so those vertices have degree 4
    a = 0.4
    pts = np.array(
        [[a, 0.0, 0.0], [0.0, a, 0.0], [-a, 0.0, 0.0], [0.0, -a, 0.0]]
    )
    poly = build(CenterSet(pts))
    assert not is_simple(poly)
    degs = sorted(len(v.labels) for v in poly.vertices)
    assert degs == [4, 4]


def test_two_faces_sharing_two_edges_not_standard():
    pts = np.array(
        [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.5, 0.3, 0.0],
            [0.5, -0.3, 0.0],
        ]
    )
    poly = build(CenterSet(pts))
    shared = [e for e in poly.edges if sorted(e.pair) == [0, 1]]
    assert len(shared) == 2
    assert not is_standard(poly)


def test_strict_build_rejects_concyclic_square():
    a = 0.4
    pts = np.array(
        [[a, 0.0, 0.0], [0.0, a, 0.0], [-a, 0.0, 0.0], [0.0, -a, 0.0]]
    )
    with pytest.raises(DegenerateConfigurationError):
        build(CenterSet(pts), strict=True)


def test_build_requires_reduced_input(tetra_centers):
    extra = np.vstack([tetra_centers.points, tetra_centers.points.mean(axis=0)])
    with pytest.raises(Exception):
        build(CenterSet(extra))


# ---------------------------------------------------------------------------
# random instances: combinatorial sanity


def test_random_standard_instances(standard_instances):
    assert len(standard_instances) == 20
    for cs, poly in standard_instances:
        v, e, f = poly.f_vector
        assert v - e + f == 2
        assert is_simple(poly)
        assert 2 * e == 3 * v
        assert f == len(cs)
        # every vertex lies on all spheres named by its labels and inside
        # the rest
        for vert in poly.vertices:
            for j, c in enumerate(cs.points):
                d = np.linalg.norm(vert.position - c)
                if j in vert.labels:
                    assert abs(d - 1.0) < 1e-7
                else:
                    assert d < 1.0 + 1e-9


def test_label_permutation_equivariance(tetra_centers):
    rng = np.random.default_rng(53)
    perm = rng.permutation(4)
    cs = CenterSet(tetra_centers.points[perm])
    poly = build(reduce_centers(cs))
    assert poly.f_vector == (4, 6, 4)
    assert is_simple(poly) and is_standard(poly)


# ---------------------------------------------------------------------------
# duality


def test_tetra_dual_structure(tetra_poly):
    d = dual(tetra_poly)
    assert d.f_vector == (4, 6, 4)
    assert is_standard(d)


def test_tetra_double_dual_returns_original_centers(tetra_poly, tetra_centers):
    d = dual(tetra_poly)
    dd = dual(d)
    got = sorted(tuple(np.round(v.position, 8)) for v in dd.vertices)
    want = sorted(tuple(np.round(c, 8)) for c in tetra_centers.points)
    assert got == want


def test_dual_rejects_non_standard():
    poly = build(CenterSet(np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])))
    with pytest.raises(DualityError):
        dual(poly)


def test_dual_on_random_instances(standard_instances):
    for cs, poly in standard_instances[:6]:
        d = dual(poly)
        v, e, f = poly.f_vector
        assert d.f_vector == (f, e, v)
        assert is_standard(d)


def test_center_set_rejects_duplicates():
    with pytest.raises(Exception):
        CenterSet(np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]))


def test_center_set_rejects_nonfinite():
    with pytest.raises(Exception):
        CenterSet(np.array([[0.0, 0.0, 0.0], [np.inf, 0.0, 0.0]]))
