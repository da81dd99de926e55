"""Independent brute-force predicates used to cross-check the library.

The oracle decides membership for EVERY index subset by one generic
recipe: parametrize the affine set of points equidistant from the subset,
then ask a strict feasibility LP for the remaining centers. No circumsphere
arithmetic, no merging logic; merged degenerate cells fall out naturally
because proper subsets of a co-spherical family fail the strict test.
"""
from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import linprog

BOX = 1.0e4
TOL = 1.0e-7


def _equidistant_affine(points: np.ndarray, subset: tuple[int, ...]):
    """Affine set {x : |x-c_a| = |x-c_b| for a, b in subset} as x0 + N y.

    Returns None when the equality system is inconsistent.
    """
    i0 = subset[0]
    rows = []
    rhs = []
    for j in subset[1:]:
        rows.append(2.0 * (points[j] - points[i0]))
        rhs.append(float(points[j] @ points[j] - points[i0] @ points[i0]))
    if not rows:
        return np.zeros(3), np.eye(3)
    A = np.array(rows)
    b = np.array(rhs)
    x0, *_ = np.linalg.lstsq(A, b, rcond=None)
    if np.linalg.norm(A @ x0 - b) > 1e-8 * max(1.0, np.linalg.norm(b)):
        return None
    _u, sv, vt = np.linalg.svd(A)
    rank = int(np.sum(sv > 1e-12 * sv[0]))
    null = vt[rank:].T  # (3, 3-rank)
    return x0, null


def brute_force_delaunay(points: np.ndarray, tol: float = TOL) -> set[frozenset[int]]:
    """All index sets admitting a sphere through them with the rest inside."""
    n = points.shape[0]
    members: set[frozenset[int]] = set()
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(n), size):
            param = _equidistant_affine(points, subset)
            if param is None:
                continue
            x0, null = param
            i0 = subset[0]
            others = [j for j in range(n) if j not in subset]
            if not others:
                members.add(frozenset(subset))
                continue
            # strict: 2 x . (c_j - c_i0) > |c_j|^2 - |c_i0|^2 for all others
            G3 = 2.0 * (points[others] - points[i0])
            h3 = np.einsum("ij,ij->i", points[others], points[others]) - float(
                points[i0] @ points[i0]
            )
            dim = null.shape[1]
            if dim == 0:
                margin = float(np.min(G3 @ x0 - h3))
            else:
                G = G3 @ null
                h = h3 - G3 @ x0
                c = np.zeros(dim + 1)
                c[-1] = -1.0
                A_ub = np.hstack([-G, np.ones((len(others), 1))])
                res = linprog(
                    c,
                    A_ub=A_ub,
                    b_ub=-h,
                    bounds=[(-BOX, BOX)] * dim + [(-1e6, 1e3)],
                    method="highs",
                )
                margin = -res.fun if res.success else -np.inf
            if margin > tol:
                members.add(frozenset(subset))
    return members


def brute_force_voronoi_vertex_sets(
    points: np.ndarray, tol: float = 1e-9
) -> set[frozenset[int]]:
    """Vertices of the farthest tiling via pure sampling-free equidistance.

    A point is a vertex when 4+ centers tie for the maximum distance; we
    find candidates as equidistant points of 4-subsets and keep those whose
    tie set attains the global maximum.
    """
    n = points.shape[0]
    out: set[frozenset[int]] = set()
    for quad in itertools.combinations(range(n), 4):
        param = _equidistant_affine(points, quad)
        if param is None:
            continue
        x0, null = param
        if null.shape[1] != 0:
            continue  # not a point: degenerate quad
        d = np.linalg.norm(points - x0, axis=1)
        rmax = float(d.max())
        ties = frozenset(int(k) for k in np.flatnonzero(d >= rmax - tol))
        if quad[0] in ties and all(q in ties for q in quad):
            out.add(ties)
    return out
