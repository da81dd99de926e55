"""Both kernel backends must implement the same arithmetic."""
from __future__ import annotations

import numpy as np
import pytest

from ballrigid import kernels
from ballrigid.kernels import _numpy_impl

try:
    from ballrigid.kernels import _numba_impl
except ImportError:  # pragma: no cover
    _numba_impl = None

needs_numba = pytest.mark.skipif(_numba_impl is None, reason="numba unavailable")


def test_backend_reports_a_name():
    assert kernels.backend() in ("numba", "numpy")


def test_max_dist_matches_naive():
    rng = np.random.default_rng(23)
    centers = rng.normal(size=(9, 3))
    for _ in range(20):
        p = rng.normal(size=3)
        expected = max(np.linalg.norm(p - c) for c in centers)
        assert kernels.max_dist_to_centers(p, centers) == pytest.approx(expected, abs=1e-12)


def test_batch_matches_scalar():
    rng = np.random.default_rng(29)
    centers = rng.normal(size=(7, 3))
    points = rng.normal(size=(40, 3))
    batch = kernels.max_dist_batch(points, centers)
    for k in range(points.shape[0]):
        assert batch[k] == pytest.approx(
            kernels.max_dist_to_centers(points[k], centers), abs=1e-12
        )


def test_golden_section_finds_convex_minimum():
    rng = np.random.default_rng(31)
    for _ in range(10):
        centers = rng.normal(size=(6, 3)) * 0.4
        p0 = rng.normal(size=3) * 0.1
        u = rng.normal(size=3)
        u /= np.linalg.norm(u)
        t_star, g_star = kernels.min_max_dist_on_segment(p0, u, -3.0, 3.0, centers)
        grid = np.linspace(-3.0, 3.0, 20001)
        samples = kernels.max_dist_batch(p0[None, :] + grid[:, None] * u[None, :], centers)
        assert g_star <= samples.min() + 1e-6


@needs_numba
def test_backends_agree():
    rng = np.random.default_rng(37)
    centers = rng.normal(size=(8, 3))
    points = rng.normal(size=(25, 3))
    p = rng.normal(size=3)
    u = rng.normal(size=3)
    u /= np.linalg.norm(u)
    a = rng.normal(size=(30, 3))
    b = rng.normal(size=(40, 3))

    assert _numba_impl.max_dist_to_centers(p, centers) == pytest.approx(
        _numpy_impl.max_dist_to_centers(p, centers), abs=1e-13
    )
    np.testing.assert_allclose(
        _numba_impl.max_dist_batch(points, centers),
        _numpy_impl.max_dist_batch(points, centers),
        atol=1e-13,
    )
    t1, g1 = _numba_impl.min_max_dist_on_segment(p, u, -2.0, 2.0, centers)
    t2, g2 = _numpy_impl.min_max_dist_on_segment(p, u, -2.0, 2.0, centers)
    assert t1 == pytest.approx(t2, abs=1e-9)
    assert g1 == pytest.approx(g2, abs=1e-12)
    assert _numba_impl.directed_max_min(a, b) == pytest.approx(
        _numpy_impl.directed_max_min(a, b), abs=1e-13
    )


def test_directed_max_min_matches_naive():
    rng = np.random.default_rng(41)
    a = rng.normal(size=(15, 3))
    b = rng.normal(size=(12, 3))
    expected = max(min(np.linalg.norm(x - y) for y in b) for x in a)
    assert kernels.directed_max_min(a, b) == pytest.approx(expected, abs=1e-12)
