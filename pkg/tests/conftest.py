from __future__ import annotations

import numpy as np
import pytest

from ballrigid import CenterSet, build, is_simple, is_standard, reduce_centers
from ballrigid.errors import BallRigidError

# regular tetrahedron with unit edge length
TETRA_POINTS = np.array(
    [
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.5, np.sqrt(3.0) / 2.0, 0.0],
        [0.5, np.sqrt(3.0) / 6.0, np.sqrt(2.0 / 3.0)],
    ]
)


@pytest.fixture(scope="session")
def tetra_centers() -> CenterSet:
    return CenterSet(TETRA_POINTS)


@pytest.fixture(scope="session")
def tetra_poly(tetra_centers):
    return build(reduce_centers(tetra_centers))


def sample_centers_in_ball(rng: np.random.Generator, n: int, radius: float = 0.3) -> np.ndarray:
    """n points i.i.d. uniform in a ball of the given radius."""
    directions = rng.normal(size=(n, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = radius * rng.uniform(size=(n, 1)) ** (1.0 / 3.0)
    return directions * radii


def sample_simple_standard(
    rng: np.random.Generator, count: int, n_range=(4, 10), radius: float = 0.3
):
    """Rejection-sample reduced center sets whose polyhedron is simple and standard.

    Degenerate draws (tolerance-policy rejections) are redrawn, never counted.
    Yields (centers, polyhedron) pairs.
    """
    out = []
    while len(out) < count:
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        pts = sample_centers_in_ball(rng, n, radius)
        try:
            centers = CenterSet(pts)
            reduced = reduce_centers(centers)
            if len(reduced) < 4:
                continue
            poly = build(reduced)
            if not is_simple(poly):
                continue
            if not is_standard(poly):
                continue
        except BallRigidError:
            continue
        out.append((reduced, poly))
    return out


@pytest.fixture(scope="session")
def standard_instances():
    """Twenty cached random simple standard instances for structural tests."""
    rng = np.random.default_rng(515253)
    return sample_simple_standard(rng, 20)
