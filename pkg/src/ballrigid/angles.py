"""Dihedral and face angles of a ball-polyhedron.

The inner dihedral angle along an edge is computed two ways: geometrically,
from the supporting half-spaces of the two balls at a relative-interior edge
point, and in closed form from the center distance.  The two routes must
agree to 1e-7 or a ``ConsistencyError`` is raised; the geometric value is the
one returned.
"""
from __future__ import annotations

import numpy as np

from .ballpoly import BallPolyhedron, _walk_tangent
from .errors import ConsistencyError, DegenerateConfigurationError

__all__ = [
    "dihedral_from_distance",
    "distance_from_dihedral",
    "inner_dihedral",
    "face_angle",
]


def dihedral_from_distance(d: float) -> float:
    """Inner dihedral angle along an edge whose generating centers are ``d`` apart.

    Strictly decreasing from pi (d -> 0) to 0 (d -> 2).
    """
    if not (0.0 < d < 2.0):
        raise ValueError(f"center distance must lie in (0, 2), got {d!r}")
    return float(np.pi - np.arccos(1.0 - 0.5 * d * d))


def distance_from_dihedral(alpha: float) -> float:
    """Inverse of ``dihedral_from_distance`` on (0, pi)."""
    if not (0.0 < alpha < np.pi):
        raise ValueError(f"dihedral angle must lie in (0, pi), got {alpha!r}")
    return float(2.0 * np.cos(0.5 * alpha))


def _geometric_dihedral_at(point: np.ndarray, c1: np.ndarray, c2: np.ndarray) -> float:
    """Angle of the wedge of the two supporting half-spaces at an edge point."""
    n1 = point - c1
    n2 = point - c2
    n1 = n1 / np.linalg.norm(n1)
    n2 = n2 / np.linalg.norm(n2)
    cos_between = float(np.clip(np.dot(n1, n2), -1.0, 1.0))
    return float(np.pi - np.arccos(cos_between))


def inner_dihedral(poly: BallPolyhedron, edge_id: int) -> float:
    """Inner dihedral angle of the wedge along an edge of the ball-polyhedron.

    Sampled at three relative-interior arc points to confirm the angle is
    constant along the edge, then cross-checked against the closed form.
    """
    e = poly.edges[edge_id]
    if e.arc.circle.radius <= poly.centers.tol.eps_geom:
        raise DegenerateConfigurationError("tangential edge")
    c1 = poly.centers.points[e.pair[0]]
    c2 = poly.centers.points[e.pair[1]]
    samples = [_geometric_dihedral_at(e.arc.point_at(s), c1, c2) for s in (0.25, 0.5, 0.75)]
    if max(samples) - min(samples) > 1e-9:
        raise ConsistencyError("dihedral angle varies along the edge")
    geometric = samples[1]
    d = float(np.linalg.norm(c2 - c1))
    closed_form = dihedral_from_distance(d)
    if abs(geometric - closed_form) > 1e-7:
        raise ConsistencyError(
            f"dihedral angle mismatch: geometric {geometric!r} vs closed form {closed_form!r}"
        )
    return geometric


def face_angle(poly: BallPolyhedron, face_id: int, vertex_id: int) -> float:
    """Interior angle of a face at one of its vertices, in (0, 2*pi).

    Measured between the tangent half-lines of the two boundary edges meeting
    at the vertex, counterclockwise around the outward normal of the face
    sphere: the angle from the outgoing tangent to the reversed incoming one.
    """
    face = poly.faces[face_id]
    incoming = None
    outgoing = None
    for cycle in face.cycles:
        k = len(cycle)
        for idx, (e_id, fwd) in enumerate(cycle):
            e = poly.edges[e_id]
            start = e.v_start if fwd else e.v_end
            end = e.v_end if fwd else e.v_start
            if end == vertex_id:
                incoming = (e_id, fwd)
            if start == vertex_id:
                outgoing = (e_id, fwd)
        if incoming is not None and outgoing is not None:
            break
    if incoming is None or outgoing is None:
        raise ValueError("vertex does not lie on the face boundary")

    v = poly.vertices[vertex_id].position
    center = poly.centers.points[face.center_index]
    normal = v - center
    normal = normal / np.linalg.norm(normal)

    t_out = _walk_tangent(poly.edges[outgoing[0]], outgoing[1], at_start=True)
    t_in = _walk_tangent(poly.edges[incoming[0]], incoming[1], at_start=False)
    a = t_out - np.dot(t_out, normal) * normal
    b = -t_in - np.dot(-t_in, normal) * normal
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    ang = float(np.arctan2(np.dot(normal, np.cross(a, b)), np.dot(a, b))) % (2.0 * np.pi)
    if ang == 0.0:
        ang = 2.0 * np.pi
    return ang
