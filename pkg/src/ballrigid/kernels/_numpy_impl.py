"""Pure-numpy implementations of the hot kernels.

Selected as the package backend when numba is unavailable or when the
environment variable ``BALLRIGID_NUMBA`` is set to ``0``/``false``/``no``.
The numba twin in ``_numba_impl`` implements the same arithmetic.
"""
from __future__ import annotations

import numpy as np

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def max_dist_to_centers(point: np.ndarray, centers: np.ndarray) -> float:
    """max_i |point - centers[i]|."""
    d = centers - point
    return float(np.sqrt(np.einsum("ij,ij->i", d, d).max()))


def max_dist_batch(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Per-row max distance from each of ``points`` to the center set."""
    d = points[:, None, :] - centers[None, :, :]
    return np.sqrt(np.einsum("pij,pij->pi", d, d).max(axis=1))


def min_max_dist_on_segment(
    p0: np.ndarray,
    u: np.ndarray,
    t_lo: float,
    t_hi: float,
    centers: np.ndarray,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> tuple[float, float]:
    """Golden-section minimization of t -> max_i |p0 + t*u - centers[i]|.

    The objective is convex in t, so golden section converges to the global
    minimum over [t_lo, t_hi].  Returns (t*, value).
    """

    def g(t: float) -> float:
        d = centers - (p0 + t * u)
        return float(np.sqrt(np.einsum("ij,ij->i", d, d).max()))

    a, b = float(t_lo), float(t_hi)
    c = b - _INVPHI * (b - a)
    d_ = a + _INVPHI * (b - a)
    gc, gd = g(c), g(d_)
    for _ in range(max_iter):
        if b - a <= tol * (1.0 + abs(a) + abs(b)):
            break
        if gc < gd:
            b, d_, gd = d_, c, gc
            c = b - _INVPHI * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d_, gd
            d_ = a + _INVPHI * (b - a)
            gd = g(d_)
    t_best = 0.5 * (a + b)
    return t_best, g(t_best)


def directed_max_min(a: np.ndarray, b: np.ndarray) -> float:
    """sup over rows of ``a`` of the distance to the nearest row of ``b``."""
    worst = 0.0
    # chunk to bound memory on large samples
    step = 512
    for start in range(0, a.shape[0], step):
        block = a[start : start + step]
        d = block[:, None, :] - b[None, :, :]
        mins = np.sqrt(np.einsum("pij,pij->pi", d, d).min(axis=1))
        m = float(mins.max()) if mins.size else 0.0
        if m > worst:
            worst = m
    return worst
