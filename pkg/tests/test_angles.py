"""Dihedral angle law and face angles.

Independent oracle for the closed form: at a point x on the intersection
circle of unit spheres around c1 and c2, the inner dihedral angle is the
angle between the half-planes tangent to the two spheres, which comes out
of the two outward normals directly. The closed form must match that
construction everywhere on the legal distance range.
"""
from __future__ import annotations

import numpy as np
import pytest

from ballrigid import (
    CenterSet,
    build,
    dihedral_from_distance,
    distance_from_dihedral,
    face_angle,
    inner_dihedral,
)
from ballrigid.errors import ConsistencyError, DegenerateConfigurationError
from ballrigid.geom import sphere_pair_circle


def _oracle_dihedral(d: float) -> float:
    """Angle between sphere tangent half-planes at a circle point.

    Place c1=(0,0,0), c2=(d,0,0); the circle point p=(d/2, r, 0) with
    r=sqrt(1-d^2/4). Outward normals are p-c1 and p-c2; the inner dihedral
    is pi minus the angle between them.
    """
    r = np.sqrt(1.0 - d * d / 4.0)
    p = np.array([d / 2.0, r, 0.0])
    n1 = p / np.linalg.norm(p)
    n2 = (p - np.array([d, 0.0, 0.0])) / np.linalg.norm(p - np.array([d, 0.0, 0.0]))
    return np.pi - np.arccos(np.clip(np.dot(n1, n2), -1.0, 1.0))


# frozen reference values
# d=1: cos(angle between normals) = 1 - 1/2 = 1/2, so alpha = pi - pi/3
ALPHA_AT_UNIT = 2.0943951023931953  # 2*pi/3
# d=sqrt(2): normals orthogonal, alpha = pi/2
ALPHA_AT_SQRT2 = 1.5707963267948966


def test_frozen_values():
    assert dihedral_from_distance(1.0) == pytest.approx(ALPHA_AT_UNIT, abs=1e-15)
    assert dihedral_from_distance(np.sqrt(2.0)) == pytest.approx(
        ALPHA_AT_SQRT2, abs=1e-15
    )


def test_closed_form_matches_oracle():
    for d in np.linspace(0.05, 1.95, 77):
        assert dihedral_from_distance(d) == pytest.approx(
            _oracle_dihedral(d), abs=1e-12
        )


def test_monotone_decreasing():
    grid = np.linspace(1e-3, 2 - 1e-3, 1000)
    vals = np.array([dihedral_from_distance(d) for d in grid])
    assert np.all(np.diff(vals) < 0)


def test_limits():
    assert dihedral_from_distance(1e-9) == pytest.approx(np.pi, abs=1e-6)
    assert dihedral_from_distance(2 - 1e-12) == pytest.approx(0.0, abs=1e-5)


def test_roundtrip():
    rng = np.random.default_rng(61)
    for d in rng.uniform(0.01, 1.99, size=300):
        assert distance_from_dihedral(dihedral_from_distance(d)) == pytest.approx(
            d, abs=1e-12
        )
    for a in rng.uniform(0.01, np.pi - 0.01, size=300):
        assert dihedral_from_distance(distance_from_dihedral(a)) == pytest.approx(
            a, abs=1e-12
        )


def test_domain_errors():
    for bad in (0.0, -1.0, 2.0, 2.5):
        with pytest.raises(ValueError):
            dihedral_from_distance(bad)
    for bad in (0.0, np.pi, 4.0, -0.1):
        with pytest.raises(ValueError):
            distance_from_dihedral(bad)


def test_tetra_edge_dihedrals(tetra_poly):
    # all six edges have center distance 1, so every dihedral is 2*pi/3
    for eid in range(len(tetra_poly.edges)):
        assert inner_dihedral(tetra_poly, eid) == pytest.approx(
            ALPHA_AT_UNIT, abs=1e-9
        )


def test_dihedral_on_random_instances(standard_instances):
    for cs, poly in standard_instances[:8]:
        for eid, e in enumerate(poly.edges):
            d = np.linalg.norm(cs.points[e.pair[0]] - cs.points[e.pair[1]])
            assert inner_dihedral(poly, eid) == pytest.approx(
                dihedral_from_distance(d), abs=1e-9
            )


def test_face_angles_positive_and_bounded(tetra_poly):
    for fid, face in enumerate(tetra_poly.faces):
        for vid in tetra_poly.face_vertices[fid]:
            a = face_angle(tetra_poly, fid, vid)
            assert 0.0 < a < 2.0 * np.pi


def test_tetra_face_angles_equal_by_symmetry(tetra_poly):
    vals = []
    for fid in range(4):
        for vid in tetra_poly.face_vertices[fid]:
            vals.append(face_angle(tetra_poly, fid, vid))
    assert len(vals) == 12
    assert max(vals) - min(vals) < 1e-9
