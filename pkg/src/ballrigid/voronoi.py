"""Farthest-point Voronoi tiling and farthest-point Delaunay complex.

Every cell here is about being FAR from a center: the cell of c_i collects
the points at least as far from c_i as from every other center, and a
polytope conv{c_i : i in I} enters the Delaunay complex exactly when some
sphere passes through all of {c_i : i in I} with every other center
strictly inside. The two structures are built by separate code paths so
they can be played against each other as a consistency check.

Subset enumeration is O(n^4) on purpose: the intended inputs have at most
a few dozen centers, and the enumeration keeps every membership decision
an explicit, auditable predicate.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import linprog

from .ballpoly import CenterSet
from .geom import circumcircle, circumsphere, plane_basis

NDArrayFloat = NDArray[np.float64]

# half-width of the box used to truncate unbounded LPs and feature polygons
WINDOW = 1.0e4
# witness margins smaller than this are treated as boundary cases, not
# decisions
MARGIN_TOL = 1.0e-7


def _margin_lp(
    G: NDArrayFloat, h: NDArrayFloat, dim: int
) -> tuple[float, NDArrayFloat | None]:
    """Maximize s subject to G y >= h + s with |y|_inf <= WINDOW.

    Returns (best margin, maximizer y). With no rows the problem is vacuous
    and the margin is reported as the cap value.
    """
    if G.shape[0] == 0:
        return 1.0e3, np.zeros(dim)
    c = np.zeros(dim + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-G, np.ones((G.shape[0], 1))])
    bounds = [(-WINDOW, WINDOW)] * dim + [(-1.0e6, 1.0e3)]
    res = linprog(c, A_ub=A_ub, b_ub=-h, bounds=bounds, method="highs")
    if not res.success:
        return -np.inf, None
    return -res.fun, res.x[:dim]


def _clip_polygon(
    rows: NDArrayFloat, rhs: NDArrayFloat, window: float = WINDOW
) -> NDArrayFloat:
    """Intersect the square [-window, window]^2 with half-planes a.y >= b."""
    poly: list[NDArrayFloat] = [
        np.array([-window, -window]),
        np.array([window, -window]),
        np.array([window, window]),
        np.array([-window, window]),
    ]
    for a, b in zip(rows, rhs):
        if not poly:
            break
        clipped: list[NDArrayFloat] = []
        m = len(poly)
        for k in range(m):
            s, e = poly[k], poly[(k + 1) % m]
            fs = float(a @ s - b)
            fe = float(a @ e - b)
            if fs >= -1e-12:
                clipped.append(s)
                if fe < -1e-12:
                    t = fs / (fs - fe)
                    clipped.append(s + t * (e - s))
            elif fe >= -1e-12:
                t = fs / (fs - fe)
                clipped.append(s + t * (e - s))
        poly = clipped
    return np.array(poly) if poly else np.zeros((0, 2))


@dataclass
class VoronoiCell:
    """One farthest-point cell as an intersection of half-spaces.

    Rows satisfy normals[k] . x >= offsets[k]; row k encodes being at least
    as far from the cell's own center as from the k-th other center.
    """

    index: int
    normals: NDArrayFloat
    offsets: NDArrayFloat
    empty: bool
    bounded: bool
    margin_point: NDArrayFloat | None = None

    def contains(self, x: NDArrayFloat, slack: float = 1e-9) -> bool:
        if self.normals.shape[0] == 0:
            return True
        return bool(np.all(self.normals @ x >= self.offsets - slack))


@dataclass
class VoronoiFeature:
    """A vertex, edge, or 2-dimensional face of the tiling.

    index_set holds every center achieving the common farthest distance on
    the feature's relative interior. Edge geometry is base + t*direction on
    [t_lo, t_hi] with infinite ends allowed; face geometry is a plane point
    with an orthonormal in-plane basis, half-plane rows in those
    coordinates, and the window-clipped polygon for sampling.
    """

    kind: str  # "vertex" | "edge" | "face"
    index_set: frozenset[int]
    degenerate: bool = False
    point: NDArrayFloat | None = None
    base: NDArrayFloat | None = None
    direction: NDArrayFloat | None = None
    t_lo: float = 0.0
    t_hi: float = 0.0
    edge_kind: str = ""  # "segment" | "ray" | "line"
    plane_point: NDArrayFloat | None = None
    plane_u: NDArrayFloat | None = None
    plane_v: NDArrayFloat | None = None
    halfplane_rows: NDArrayFloat | None = None
    halfplane_rhs: NDArrayFloat | None = None
    polygon: NDArrayFloat | None = None

    def edge_point(self, t: float) -> NDArrayFloat:
        assert self.kind == "edge"
        return self.base + t * self.direction

    def face_point(self, y: NDArrayFloat) -> NDArrayFloat:
        assert self.kind == "face"
        return self.plane_point + y[0] * self.plane_u + y[1] * self.plane_v


@dataclass
class VoronoiComplex:
    centers: CenterSet
    cells: list[VoronoiCell]
    features: list[VoronoiFeature]

    @property
    def vertices(self) -> list[VoronoiFeature]:
        return [f for f in self.features if f.kind == "vertex"]

    @property
    def edges(self) -> list[VoronoiFeature]:
        return [f for f in self.features if f.kind == "edge"]

    @property
    def faces(self) -> list[VoronoiFeature]:
        return [f for f in self.features if f.kind == "face"]

    def feature_by_set(self, index_set: frozenset[int]) -> VoronoiFeature | None:
        for f in self.features:
            if f.index_set == index_set:
                return f
        return None


def _cell_rows(pts: NDArrayFloat, i: int) -> tuple[NDArrayFloat, NDArrayFloat]:
    others = [j for j in range(pts.shape[0]) if j != i]
    normals = 2.0 * (pts[others] - pts[i])
    offsets = np.einsum("ij,ij->i", pts[others], pts[others]) - float(pts[i] @ pts[i])
    return normals, offsets


def _has_recession_direction(normals: NDArrayFloat) -> bool:
    # unbounded iff some nonzero d satisfies normals @ d >= 0
    for k in range(3):
        for sign in (1.0, -1.0):
            c = np.zeros(3)
            c[k] = -sign
            res = linprog(
                c,
                A_ub=-normals,
                b_ub=np.zeros(normals.shape[0]),
                bounds=[(-1.0, 1.0)] * 3,
                method="highs",
            )
            if res.success and -res.fun > 1e-9:
                return True
    return False


def build_voronoi(centers: CenterSet) -> VoronoiComplex:
    """Enumerate all cells and all features of the farthest-point tiling."""
    pts = centers.points
    n = pts.shape[0]
    if n < 2:
        raise ValueError("need at least two centers")

    cells: list[VoronoiCell] = []
    for i in range(n):
        normals, offsets = _cell_rows(pts, i)
        margin, y = _margin_lp(normals, offsets, 3)
        empty = margin < MARGIN_TOL
        bounded = True if empty else not _has_recession_direction(normals)
        cells.append(
            VoronoiCell(
                index=i,
                normals=normals,
                offsets=offsets,
                empty=empty,
                bounded=bounded,
                margin_point=None if y is None else np.asarray(y),
            )
        )

    features: dict[tuple[str, frozenset[int]], VoronoiFeature] = {}

    # vertices: circumcenters of 4-subsets whose sphere encloses everything
    for quad in itertools.combinations(range(n), 4):
        sphere = circumsphere(*(pts[k] for k in quad))
        if sphere is None:
            continue
        p, r = sphere
        dists = np.linalg.norm(pts - p, axis=1)
        rmax = float(dists.max())
        atol = 1e-9 * max(1.0, rmax)
        if r < rmax - atol:
            continue  # some center is farther: p is not in the quad's cells
        index_set = frozenset(int(j) for j in np.flatnonzero(dists >= rmax - atol))
        key = ("vertex", index_set)
        if key not in features:
            features[key] = VoronoiFeature(
                kind="vertex",
                index_set=index_set,
                point=p,
                degenerate=len(index_set) > 4,
            )

    # edges: equidistant lines of 3-subsets, clipped by the other centers
    for triple in itertools.combinations(range(n), 3):
        edge = _edge_feature(pts, triple)
        if edge is not None:
            key = ("edge", edge.index_set)
            features.setdefault(key, edge)

    # faces: bisector-plane regions of pairs
    for i, j in itertools.combinations(range(n), 2):
        face = _face_feature(pts, i, j)
        if face is not None:
            key = ("face", face.index_set)
            features.setdefault(key, face)

    ordered = sorted(
        features.values(),
        key=lambda f: ({"vertex": 0, "edge": 1, "face": 2}[f.kind], sorted(f.index_set)),
    )
    return VoronoiComplex(centers=centers, cells=cells, features=ordered)


def _edge_interval(
    pts: NDArrayFloat, triple: tuple[int, ...]
) -> tuple[NDArrayFloat, NDArrayFloat, float, float, set[int]] | None:
    """Equidistant line of a triple with the feasibility interval on it.

    Returns (base, direction, t_lo, t_hi, co-circular index set) where the
    open interval is where the triple is strictly farthest; co-circular
    centers give identically-zero constraints and join the index set.
    """
    try:
        q, _rc, axis = circumcircle(pts[triple[0]], pts[triple[1]], pts[triple[2]])
    except Exception:
        return None  # collinear: no equidistant line
    i0 = triple[0]
    t_lo, t_hi = -np.inf, np.inf
    merged: set[int] = set(triple)
    for j in range(pts.shape[0]):
        if j in merged:
            continue
        off = float(pts[j] @ pts[j] - pts[i0] @ pts[i0]) - 2.0 * float(
            q @ (pts[j] - pts[i0])
        )
        slope = 2.0 * float(axis @ (pts[i0] - pts[j]))
        if abs(slope) <= 1e-12:
            if abs(off) <= 1e-9:
                merged.add(j)  # co-circular with the triple
            elif off > 0:
                return None  # j is farther everywhere on the line
            continue
        bound = -off / slope
        if slope > 0:
            t_hi = min(t_hi, bound)
        else:
            t_lo = max(t_lo, bound)
    return q, axis, t_lo, t_hi, merged


def _edge_feature(pts: NDArrayFloat, triple: tuple[int, ...]) -> VoronoiFeature | None:
    got = _edge_interval(pts, triple)
    if got is None:
        return None
    q, axis, t_lo, t_hi, merged = got
    if t_hi - t_lo <= 1e-9:
        return None
    if np.isinf(t_lo) and np.isinf(t_hi):
        kind = "line"
    elif np.isinf(t_lo) or np.isinf(t_hi):
        kind = "ray"
    else:
        kind = "segment"
    return VoronoiFeature(
        kind="edge",
        index_set=frozenset(merged),
        base=q,
        direction=axis,
        t_lo=t_lo,
        t_hi=t_hi,
        edge_kind=kind,
        degenerate=len(merged) > 3,
    )


def _pair_plane(
    pts: NDArrayFloat, i: int, j: int
) -> tuple[NDArrayFloat, NDArrayFloat, NDArrayFloat]:
    a = 2.0 * (pts[j] - pts[i])
    b = float(pts[j] @ pts[j] - pts[i] @ pts[i])
    x0 = (b / float(a @ a)) * a
    u, v = plane_basis(a / np.linalg.norm(a))
    return x0, u, v


def _pair_rows(
    pts: NDArrayFloat, i: int, j: int
) -> tuple[NDArrayFloat, NDArrayFloat, NDArrayFloat, NDArrayFloat, NDArrayFloat]:
    """In-plane inequality rows for 'i stays farthest' on the bisector of i, j."""
    x0, u, v = _pair_plane(pts, i, j)
    rows = []
    rhs = []
    for k in range(pts.shape[0]):
        if k in (i, j):
            continue
        g = 2.0 * (pts[k] - pts[i])
        c = float(pts[k] @ pts[k] - pts[i] @ pts[i])
        rows.append([float(g @ u), float(g @ v)])
        rhs.append(c - float(g @ x0))
    return x0, u, v, np.array(rows).reshape(-1, 2), np.array(rhs)


def _face_feature(pts: NDArrayFloat, i: int, j: int) -> VoronoiFeature | None:
    x0, u, v, rows, rhs = _pair_rows(pts, i, j)
    margin, _y = _margin_lp(rows, rhs, 2)
    if margin < -MARGIN_TOL:
        return None
    polygon = _clip_polygon(rows, rhs)
    return VoronoiFeature(
        kind="face",
        index_set=frozenset((i, j)),
        plane_point=x0,
        plane_u=u,
        plane_v=v,
        halfplane_rows=rows,
        halfplane_rhs=rhs,
        polygon=polygon,
        degenerate=margin <= MARGIN_TOL,
    )


# ---------------------------------------------------------------------------
# Delaunay side


@dataclass(frozen=True)
class DelaunayCell:
    """conv{c_i : i in index_set} plus the witness sphere that admitted it."""

    index_set: frozenset[int]
    dimension: int
    witness_center: tuple[float, float, float]
    witness_radius: float
    degenerate: bool = False

    def points(self, centers: CenterSet) -> NDArrayFloat:
        return centers.points[sorted(self.index_set)]


@dataclass
class DelaunayComplex:
    centers: CenterSet
    cells: list[DelaunayCell]
    boundary_sets: list[frozenset[int]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.by_set = {c.index_set: c for c in self.cells}

    def of_dimension(self, d: int) -> list[DelaunayCell]:
        return [c for c in self.cells if c.dimension == d]

    def __contains__(self, index_set: frozenset[int]) -> bool:
        return index_set in self.by_set


def _affine_dimension(pts: NDArrayFloat) -> int:
    if pts.shape[0] <= 1:
        return 0
    centered = pts - pts.mean(axis=0)
    sv = np.linalg.svd(centered, compute_uv=False)
    scale = sv[0] if sv[0] > 0 else 1.0
    return int(np.sum(sv > 1e-9 * scale))


def build_delaunay(centers: CenterSet) -> DelaunayComplex:
    """Membership by explicit farthest-witness predicates, one per dimension.

    Co-spherical and co-circular degeneracies are merged into single
    polytopal cells by index-set union; near-threshold margins are recorded
    as boundary sets instead of being forced either way.
    """
    pts = centers.points
    n = pts.shape[0]
    if n < 2:
        raise ValueError("need at least two centers")

    found: dict[frozenset[int], DelaunayCell] = {}
    boundary: list[frozenset[int]] = []

    def add(
        index_set: frozenset[int],
        witness: NDArrayFloat,
        radius: float,
        degenerate: bool,
    ) -> None:
        if index_set in found:
            return
        found[index_set] = DelaunayCell(
            index_set=index_set,
            dimension=_affine_dimension(pts[sorted(index_set)]),
            witness_center=tuple(float(x) for x in witness),
            witness_radius=float(radius),
            degenerate=degenerate,
        )

    # 0-dimensional: single centers that can be strictly farthest
    for i in range(n):
        rows, rhs = _cell_rows(pts, i)
        # rows encode >= for ties; strict membership needs a real margin
        margin, y = _margin_lp(rows, rhs, 3)
        if margin > MARGIN_TOL:
            add(frozenset((i,)), y, float(np.linalg.norm(y - pts[i])), False)
        elif margin >= -MARGIN_TOL:
            boundary.append(frozenset((i,)))

    # 1-dimensional: pairs with a strictly-enclosing sphere centered on the
    # bisector plane
    for i, j in itertools.combinations(range(n), 2):
        x0, u, v, rows, rhs = _pair_rows(pts, i, j)
        margin, y = _margin_lp(rows, rhs, 2)
        if margin > MARGIN_TOL:
            w = x0 + y[0] * u + y[1] * v
            add(frozenset((i, j)), w, float(np.linalg.norm(w - pts[i])), False)
        elif margin >= -MARGIN_TOL:
            boundary.append(frozenset((i, j)))

    # 2-dimensional: triples (merged with any co-circular companions)
    for triple in itertools.combinations(range(n), 3):
        got = _edge_interval(pts, triple)
        if got is None:
            continue
        q, axis, t_lo, t_hi, merged = got
        length = t_hi - t_lo
        if length > MARGIN_TOL:
            if np.isinf(t_lo) and np.isinf(t_hi):
                t_mid = 0.0
            elif np.isinf(t_hi):
                t_mid = t_lo + 1.0
            elif np.isinf(t_lo):
                t_mid = t_hi - 1.0
            else:
                t_mid = 0.5 * (t_lo + t_hi)
            w = q + t_mid * axis
            add(
                frozenset(merged),
                w,
                float(np.linalg.norm(w - pts[triple[0]])),
                len(merged) > 3,
            )
        elif length >= -MARGIN_TOL:
            boundary.append(frozenset(merged))

    # 3-dimensional: 4-subsets (merged with any co-spherical companions)
    for quad in itertools.combinations(range(n), 4):
        sphere = circumsphere(*(pts[k] for k in quad))
        if sphere is None:
            continue
        p, r = sphere
        band = MARGIN_TOL * max(1.0, r)
        merged_set = set(quad)
        outside = False
        for j in range(n):
            if j in merged_set:
                continue
            d = float(np.linalg.norm(pts[j] - p))
            if d > r + band:
                outside = True
                break
            if d >= r - band:
                merged_set.add(j)
        if outside:
            continue
        add(frozenset(merged_set), p, r, len(merged_set) > 4)

    cells = sorted(found.values(), key=lambda c: (c.dimension, sorted(c.index_set)))
    uniq_boundary = sorted(set(boundary), key=sorted)
    return DelaunayComplex(centers=centers, cells=cells, boundary_sets=uniq_boundary)


# ---------------------------------------------------------------------------
# playing the two constructions against each other


@dataclass
class CorrespondenceReport:
    violations: list[str]
    degenerate: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_feature_correspondence(
    vor: VoronoiComplex, dl: DelaunayComplex
) -> CorrespondenceReport:
    """Match tiling features against complex cells in both directions.

    Vertices pair with 3-dimensional cells, edges with 2-dimensional ones,
    faces with 1-dimensional ones, and non-empty cells with 0-dimensional
    ones. Index sets flagged degenerate on either side are reported
    separately instead of counted as violations.
    """
    violations: list[str] = []
    degenerate: list[str] = []
    boundary = set(dl.boundary_sets)

    pairs = [
        ("vertex", vor.vertices, 3),
        ("edge", vor.edges, 2),
        ("face", vor.faces, 1),
    ]
    for kind, feats, dim in pairs:
        cell_sets = {c.index_set: c for c in dl.of_dimension(dim)}
        feat_sets = {f.index_set: f for f in feats}
        for iset, f in feat_sets.items():
            if iset not in cell_sets:
                msg = f"{kind} {sorted(iset)} has no {dim}-dimensional cell"
                if f.degenerate or iset in boundary:
                    degenerate.append(msg)
                else:
                    violations.append(msg)
        for iset, c in cell_sets.items():
            if iset not in feat_sets:
                msg = f"{dim}-dimensional cell {sorted(iset)} has no {kind}"
                if c.degenerate or iset in boundary:
                    degenerate.append(msg)
                else:
                    violations.append(msg)

    cells0 = {c.index_set for c in dl.of_dimension(0)}
    for cell in vor.cells:
        single = frozenset((cell.index,))
        if not cell.empty and single not in cells0:
            msg = f"non-empty cell {cell.index} missing 0-dimensional cell"
            if single in boundary:
                degenerate.append(msg)
            else:
                violations.append(msg)
        if cell.empty and single in cells0:
            violations.append(f"empty cell {cell.index} has a 0-dimensional cell")

    return CorrespondenceReport(violations=violations, degenerate=degenerate)
