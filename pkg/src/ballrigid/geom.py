"""Low-level geometric primitives shared by every other module.

Everything here works on plain ``float64`` numpy arrays of shape ``(3,)`` for
points and vectors.  All classification decisions (empty / tangent / generic)
go through an explicit :class:`Tolerance`, and near-ties are pushed to the
degenerate branch rather than silently treated as generic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .errors import DegenerateConfigurationError

NDArrayFloat = npt.NDArray[np.float64]

__all__ = [
    "Tolerance",
    "DEFAULT_TOLERANCE",
    "Circle3",
    "Arc3",
    "plane_basis",
    "sphere_pair_circle",
    "circumcircle",
    "triple_points",
    "circumsphere",
    "min_enclosing_ball",
]


@dataclass(frozen=True)
class Tolerance:
    """Numerical policy knobs.

    ``eps_geom`` separates geometric coincidence from distinctness and
    ``eps_rank`` scales the singular-value cutoff used for rank decisions.
    """

    eps_geom: float = 1e-9
    eps_rank: float = 1e-8

    def __post_init__(self) -> None:
        if not (0.0 < self.eps_geom < 1e-3):
            raise ValueError(f"eps_geom out of range (0, 1e-3): {self.eps_geom!r}")
        if not (0.0 < self.eps_rank < 1e-3):
            raise ValueError(f"eps_rank out of range (0, 1e-3): {self.eps_rank!r}")


DEFAULT_TOLERANCE = Tolerance()


def _as_point(p) -> NDArrayFloat:
    a = np.asarray(p, dtype=np.float64)
    if a.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("non-finite coordinate")
    return a


def plane_basis(normal: NDArrayFloat) -> tuple[NDArrayFloat, NDArrayFloat]:
    """Deterministic orthonormal basis (u, v) of the plane orthogonal to ``normal``.

    The first axis is the normalized projection of the global +x direction;
    if that projection is too short, +y is used instead.  ``v = normal x u``.
    """
    m = np.asarray(normal, dtype=np.float64)
    m = m / np.linalg.norm(m)
    u = np.array([1.0, 0.0, 0.0]) - m[0] * m
    if np.linalg.norm(u) < 1e-6:
        u = np.array([0.0, 1.0, 0.0]) - m[1] * m
    u = u / np.linalg.norm(u)
    v = np.cross(m, u)
    return u, v


@dataclass(frozen=True)
class Circle3:
    """A circle in 3-space: center, radius and unit plane normal."""

    center: NDArrayFloat
    radius: float
    normal: NDArrayFloat

    def axes(self) -> tuple[NDArrayFloat, NDArrayFloat]:
        return plane_basis(self.normal)

    def point_at(self, theta: float) -> NDArrayFloat:
        u, v = self.axes()
        return self.center + self.radius * (np.cos(theta) * u + np.sin(theta) * v)

    def angle_of(self, point: NDArrayFloat) -> float:
        """Angle of ``point`` (assumed on the circle) in [0, 2*pi)."""
        u, v = self.axes()
        w = point - self.center
        theta = float(np.arctan2(np.dot(w, v), np.dot(w, u)))
        return theta % (2.0 * np.pi)

    def tangent_at(self, point: NDArrayFloat) -> NDArrayFloat:
        """Unit tangent at ``point``, oriented counterclockwise around ``normal``."""
        t = np.cross(self.normal, point - self.center)
        n = np.linalg.norm(t)
        if n == 0.0:
            raise DegenerateConfigurationError("tangent undefined at circle center")
        return t / n


@dataclass(frozen=True)
class Arc3:
    """A circular arc: the piece of ``circle`` from ``theta_start`` to ``theta_end``.

    Angles are measured counterclockwise around the circle normal, with
    ``theta_start <= theta_end <= theta_start + 2*pi``.  ``full`` marks an
    entire circle (then the angles span exactly 2*pi).
    """

    circle: Circle3
    theta_start: float
    theta_end: float
    full: bool = False

    def point_at(self, s: float) -> NDArrayFloat:
        """Point at normalized parameter ``s`` in [0, 1] along the arc."""
        theta = self.theta_start + s * (self.theta_end - self.theta_start)
        return self.circle.point_at(theta)

    def midpoint(self) -> NDArrayFloat:
        return self.point_at(0.5)

    @property
    def angular_span(self) -> float:
        return self.theta_end - self.theta_start


def sphere_pair_circle(
    c1: NDArrayFloat, c2: NDArrayFloat, tol: Tolerance = DEFAULT_TOLERANCE
) -> Circle3 | None:
    """Intersection circle of the two unit spheres centered at ``c1`` and ``c2``.

    Returns ``None`` when the spheres are disjoint, a radius-0 circle at the
    tangency point when |c1 - c2| is within ``eps_geom`` of 2, and raises for
    coincident centers.
    """
    c1 = _as_point(c1)
    c2 = _as_point(c2)
    d = float(np.linalg.norm(c2 - c1))
    if d <= tol.eps_geom:
        raise DegenerateConfigurationError("coincident centers")
    if abs(d - 2.0) <= tol.eps_geom:
        mid = 0.5 * (c1 + c2)
        return Circle3(center=mid, radius=0.0, normal=(c2 - c1) / d)
    if d > 2.0:
        return None
    r = float(np.sqrt(max(0.0, 1.0 - 0.25 * d * d)))
    return Circle3(center=0.5 * (c1 + c2), radius=r, normal=(c2 - c1) / d)


def circumcircle(
    p1: NDArrayFloat, p2: NDArrayFloat, p3: NDArrayFloat, tol: Tolerance = DEFAULT_TOLERANCE
) -> tuple[NDArrayFloat, float, NDArrayFloat]:
    """Circumcenter, circumradius and unit plane normal of three points in 3-space.

    Raises for (near-)collinear input.
    """
    p1 = _as_point(p1)
    a = _as_point(p2) - p1
    b = _as_point(p3) - p1
    n = np.cross(a, b)
    nn = float(np.linalg.norm(n))
    scale = max(1.0, float(np.linalg.norm(a)), float(np.linalg.norm(b)))
    if nn <= tol.eps_geom * scale * scale:
        raise DegenerateConfigurationError("degenerate triple")
    e1 = a / np.linalg.norm(a)
    e2 = np.cross(n, e1)
    e2 = e2 / np.linalg.norm(e2)
    # 2-d coordinates: A=(0,0), B=(|a|,0), C=(b.e1, b.e2)
    bx = float(np.linalg.norm(a))
    cx = float(np.dot(b, e1))
    cy = float(np.dot(b, e2))
    x = 0.5 * bx
    y = (cx * cx + cy * cy - 2.0 * x * cx) / (2.0 * cy)
    center = p1 + x * e1 + y * e2
    radius = float(np.hypot(x, y))
    return center, radius, n / nn


def triple_points(
    c1: NDArrayFloat, c2: NDArrayFloat, c3: NDArrayFloat, tol: Tolerance = DEFAULT_TOLERANCE
) -> list[NDArrayFloat]:
    """Common points of the three unit spheres centered at ``c1``, ``c2``, ``c3``.

    The solutions sit on the axis through the circumcenter of the centers,
    at height h with h^2 = 1 - circumradius^2.  Returns 0, 1 or 2 points;
    circumradius within ``eps_geom`` of 1 collapses to the single tangential
    point.  Raises for (near-)collinear centers.
    """
    q, rc, axis = circumcircle(c1, c2, c3, tol)
    if rc > 1.0 + tol.eps_geom:
        return []
    if abs(rc - 1.0) <= tol.eps_geom:
        return [q]
    h = float(np.sqrt(max(0.0, 1.0 - rc * rc)))
    return [q + h * axis, q - h * axis]


def circumsphere(
    p1: NDArrayFloat,
    p2: NDArrayFloat,
    p3: NDArrayFloat,
    p4: NDArrayFloat,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> tuple[NDArrayFloat, float] | None:
    """Center and radius of the sphere through four points, or ``None`` if coplanar.

    Coplanarity is decided by the height of ``p4`` over the plane of the first
    three (and degenerate base triangles also return ``None``).
    """
    p1 = _as_point(p1)
    a = _as_point(p2) - p1
    b = _as_point(p3) - p1
    c = _as_point(p4) - p1
    cross_ab = np.cross(a, b)
    area2 = float(np.linalg.norm(cross_ab))
    scale = max(1.0, float(np.linalg.norm(a)), float(np.linalg.norm(b)), float(np.linalg.norm(c)))
    if area2 <= tol.eps_geom * scale * scale:
        return None
    height = abs(float(np.dot(cross_ab, c))) / area2
    if height <= tol.eps_geom * scale:
        return None
    m = 2.0 * np.stack([a, b, c])
    rhs = np.array([np.dot(a, a), np.dot(b, b), np.dot(c, c)])
    center = p1 + np.linalg.solve(m, rhs)
    radius = float(np.mean(np.linalg.norm(np.stack([p1, p1 + a, p1 + b, p1 + c]) - center, axis=1)))
    return center, radius


def _ball_through(boundary: list[NDArrayFloat]) -> tuple[NDArrayFloat, float]:
    """Smallest ball with the given (at most four) points on its boundary."""
    k = len(boundary)
    if k == 0:
        return np.zeros(3), -1.0
    if k == 1:
        return boundary[0].copy(), 0.0
    if k == 2:
        c = 0.5 * (boundary[0] + boundary[1])
        return c, float(np.linalg.norm(boundary[0] - c))
    if k == 3:
        try:
            center, radius, _ = circumcircle(*boundary)
            return center, radius
        except DegenerateConfigurationError:
            # collinear support: fall back to the farthest pair
            best = None
            for i in range(3):
                for j in range(i + 1, 3):
                    c = 0.5 * (boundary[i] + boundary[j])
                    r = float(np.linalg.norm(boundary[i] - c))
                    if best is None or r > best[1]:
                        best = (c, r)
            return best
    # k == 4
    result = circumsphere(*boundary)
    if result is not None:
        return result
    # coplanar support: smallest 3-point ball that still covers the fourth
    best = None
    for skip in range(4):
        sub = [boundary[i] for i in range(4) if i != skip]
        c, r = _ball_through(sub)
        r_needed = max(r, float(np.linalg.norm(boundary[skip] - c)))
        if best is None or r_needed < best[1]:
            best = (c, r_needed)
    return best


def min_enclosing_ball(points: NDArrayFloat) -> tuple[NDArrayFloat, float]:
    """Smallest enclosing ball of a point set (Welzl's algorithm).

    Deterministic: the recursion order comes from a fixed-seed shuffle.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if pts.shape[0] == 0:
        raise ValueError("empty point set")
    order = np.random.default_rng(1729).permutation(pts.shape[0])
    pts = [pts[i] for i in order]

    def welzl(n: int, boundary: list[NDArrayFloat]) -> tuple[NDArrayFloat, float]:
        if n == 0 or len(boundary) == 4:
            return _ball_through(boundary)
        p = pts[n - 1]
        center, radius = welzl(n - 1, boundary)
        if np.linalg.norm(p - center) <= radius * (1.0 + 1e-12) + 1e-14:
            return center, radius
        return welzl(n - 1, boundary + [p])

    import sys

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 10 * len(pts) + 1000))
    try:
        return welzl(len(pts), [])
    finally:
        sys.setrecursionlimit(old_limit)
