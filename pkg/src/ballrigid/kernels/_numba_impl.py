"""Numba-compiled twins of the kernels in ``_numpy_impl``.

Same signatures, same arithmetic; loops are written out so numba can compile
them.  ``cache=True`` amortizes compilation across processes.
"""
from __future__ import annotations

import numpy as np
from numba import njit

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


@njit(cache=True)
def _g_max(point: np.ndarray, centers: np.ndarray) -> float:
    worst = 0.0
    for i in range(centers.shape[0]):
        s = 0.0
        for k in range(3):
            diff = point[k] - centers[i, k]
            s += diff * diff
        if s > worst:
            worst = s
    return np.sqrt(worst)


@njit(cache=True)
def max_dist_to_centers(point: np.ndarray, centers: np.ndarray) -> float:
    return _g_max(point, centers)


@njit(cache=True)
def max_dist_batch(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    out = np.empty(points.shape[0])
    for p in range(points.shape[0]):
        out[p] = _g_max(points[p], centers)
    return out


@njit(cache=True)
def min_max_dist_on_segment(
    p0: np.ndarray,
    u: np.ndarray,
    t_lo: float,
    t_hi: float,
    centers: np.ndarray,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> tuple[float, float]:
    a = t_lo
    b = t_hi
    c = b - _INVPHI * (b - a)
    d_ = a + _INVPHI * (b - a)
    gc = _g_max(p0 + c * u, centers)
    gd = _g_max(p0 + d_ * u, centers)
    for _ in range(max_iter):
        if b - a <= tol * (1.0 + abs(a) + abs(b)):
            break
        if gc < gd:
            b = d_
            d_ = c
            gd = gc
            c = b - _INVPHI * (b - a)
            gc = _g_max(p0 + c * u, centers)
        else:
            a = c
            c = d_
            gc = gd
            d_ = a + _INVPHI * (b - a)
            gd = _g_max(p0 + d_ * u, centers)
    t_best = 0.5 * (a + b)
    return t_best, _g_max(p0 + t_best * u, centers)


@njit(cache=True)
def directed_max_min(a: np.ndarray, b: np.ndarray) -> float:
    worst = 0.0
    for i in range(a.shape[0]):
        best = 1e300
        for j in range(b.shape[0]):
            s = 0.0
            for k in range(3):
                diff = a[i, k] - b[j, k]
                s += diff * diff
            if s < best:
                best = s
        if best > worst:
            worst = best
    return np.sqrt(worst)
