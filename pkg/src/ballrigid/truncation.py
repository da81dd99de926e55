"""Truncated Delaunay complex, the union polyhedron, and its boundary.

Truncation keeps a Delaunay cell exactly when some point of its Voronoi
co-feature lies in the ball-polyhedron, i.e. within distance 1 of every
center. On the co-feature of an index set the distance to every named
center is the same, so the test collapses to minimizing
g(x) = max over centers of |x - c| on the co-feature and comparing to 1.

Whenever the ball-polyhedron structure is available we prefer exact
structural witnesses (a face point, an arc point, a vertex) with g = 1 over
numerical minimization; the optimizer only runs for cells whose co-feature
clears the boundary on one side or the other, where the margin is decisive.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import minimize
from scipy.spatial import ConvexHull

from . import kernels
from .ballpoly import BallPolyhedron, CenterSet, face_interior_point, is_simple
from .errors import ConsistencyError, TruncationError
from .geom import min_enclosing_ball
from .voronoi import (
    DelaunayCell,
    DelaunayComplex,
    VoronoiComplex,
    VoronoiFeature,
)

NDArrayFloat = NDArray[np.float64]

# numerical minimizers are trusted to this absolute accuracy in g
OPT_BAND = 1.0e-8


@dataclass
class TruncatedCell:
    """One farthest cell clipped by its own unit ball."""

    index: int
    normals: NDArrayFloat
    offsets: NDArrayFloat
    center: NDArrayFloat

    def contains(self, x: NDArrayFloat, slack: float = 1e-9) -> bool:
        if np.linalg.norm(x - self.center) > 1.0 + slack:
            return False
        if self.normals.shape[0] == 0:
            return True
        return bool(np.all(self.normals @ x >= self.offsets - slack))


@dataclass
class TruncatedComplex:
    """The cells of the Delaunay complex that survive truncation."""

    centers: CenterSet
    parent: DelaunayComplex
    cells: list[DelaunayCell]
    witnesses: dict[frozenset[int], NDArrayFloat]
    dropped: list[frozenset[int]]
    degenerate_sets: list[frozenset[int]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.by_set = {c.index_set: c for c in self.cells}

    def of_dimension(self, d: int) -> list[DelaunayCell]:
        return [c for c in self.cells if c.dimension == d]

    def __contains__(self, index_set: frozenset[int]) -> bool:
        return index_set in self.by_set


def truncated_cells(vor: VoronoiComplex) -> list[TruncatedCell]:
    return [
        TruncatedCell(
            index=c.index,
            normals=c.normals,
            offsets=c.offsets,
            center=vor.centers.points[c.index],
        )
        for c in vor.cells
    ]


def _min_g_on_edge(
    feature: VoronoiFeature, pts: NDArrayFloat
) -> tuple[float, NDArrayFloat, float]:
    """Minimum of g along an edge feature; returns (g, point, parameter)."""
    lo = max(feature.t_lo, -1.0e3)
    hi = min(feature.t_hi, 1.0e3)
    t, g = kernels.min_max_dist_on_segment(
        np.ascontiguousarray(feature.base),
        np.ascontiguousarray(feature.direction),
        float(lo),
        float(hi),
        pts,
    )
    return float(g), feature.edge_point(t), float(t)


def _sub_feature_min(
    index_set: frozenset[int], vor: VoronoiComplex, pts: NDArrayFloat
) -> tuple[float, NDArrayFloat] | None:
    """Best g over tiling vertices and edges whose labels contain the set.

    The minimum of the convex g over a closed co-feature is attained either
    in the relative interior or on a sub-feature, and the sub-features are
    exactly the tiling features with strictly larger index sets.
    """
    best: tuple[float, NDArrayFloat] | None = None
    for f in vor.vertices:
        if index_set <= f.index_set:
            g = float(kernels.max_dist_to_centers(np.ascontiguousarray(f.point), pts))
            if best is None or g < best[0]:
                best = (g, f.point)
    for f in vor.edges:
        if index_set < f.index_set:
            g, x, _t = _min_g_on_edge(f, pts)
            if best is None or g < best[0]:
                best = (g, x)
    return best


def _min_g_on_face(
    feature: VoronoiFeature, vor: VoronoiComplex, pts: NDArrayFloat
) -> tuple[float, NDArrayFloat] | None:
    """Minimum of g over a closed 2-dimensional face feature.

    Nelder-Mead handles the unconstrained in-plane minimum (g is convex but
    not smooth where the active center changes); when that minimizer leaves
    the region, the constrained minimum lies on the relative boundary, which
    is covered by the sub-feature candidates.
    """
    candidate = _sub_feature_min(feature.index_set, vor, pts)

    x0, u, v = feature.plane_point, feature.plane_u, feature.plane_v
    # start at the in-plane projection of the smallest enclosing ball center,
    # where the unconstrained minimum of g over all of space sits
    m, _r = min_enclosing_ball(pts)
    y_start = np.array([float((m - x0) @ u), float((m - x0) @ v)])

    def phi(y: NDArrayFloat) -> float:
        x = x0 + y[0] * u + y[1] * v
        return float(kernels.max_dist_to_centers(np.ascontiguousarray(x), pts))

    res = minimize(
        phi,
        y_start,
        method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000},
    )
    y = res.x
    feasible = bool(
        np.all(feature.halfplane_rows @ y >= feature.halfplane_rhs - 1e-9)
    )
    if feasible:
        x = x0 + y[0] * u + y[1] * v
        interior = (float(res.fun), x)
        if candidate is None or interior[0] < candidate[0]:
            return interior
    return candidate


def _structural_witness(
    cell: DelaunayCell, poly: BallPolyhedron | None, centers: CenterSet
) -> NDArrayFloat | None:
    """Exact boundary witness for membership, when the structure offers one.

    Any boundary point of the ball-polyhedron lying on all spheres of the
    cell's index set sits in the co-feature with g = 1 exactly.
    """
    if poly is None:
        return None
    iset = cell.index_set
    k = len(iset)
    if k == 1:
        (i,) = tuple(iset)
        try:
            return face_interior_point(centers, i)
        except Exception:
            return None
    if k == 2:
        pair = tuple(sorted(iset))
        for e in poly.edges:
            if tuple(sorted(e.pair)) == pair:
                return e.arc.midpoint()
    for v in poly.vertices:
        if iset <= set(v.labels):
            return v.position
    return None


def build_truncated_delaunay(
    centers: CenterSet,
    vor: VoronoiComplex,
    dl: DelaunayComplex,
    polyhedron: BallPolyhedron | None = None,
) -> TruncatedComplex:
    """Decide, cell by cell, which Delaunay members survive truncation."""
    pts = centers.points
    eps = centers.tol.eps_geom
    members: list[DelaunayCell] = []
    witnesses: dict[frozenset[int], NDArrayFloat] = {}
    dropped: list[frozenset[int]] = []
    degenerate: list[frozenset[int]] = []

    # decreasing dimension, so that witnesses of admitted cells can settle
    # every face below them: the co-feature of a face contains the
    # co-feature of the cell, hence inherits its witness point exactly
    order = sorted(dl.cells, key=lambda c: (-c.dimension, -len(c.index_set)))
    for cell in order:
        inherited = next(
            (m.index_set for m in members if m.index_set > cell.index_set), None
        )
        if inherited is not None:
            members.append(cell)
            witnesses[cell.index_set] = witnesses[inherited]
            continue

        w = _structural_witness(cell, polyhedron, centers)
        if w is not None:
            members.append(cell)
            witnesses[cell.index_set] = np.asarray(w)
            continue

        gmin, point = _co_feature_min(cell, vor, pts)
        if gmin is None:
            # could not resolve the co-feature numerically
            degenerate.append(cell.index_set)
            continue
        band = OPT_BAND if cell.dimension < 3 else eps
        if gmin <= 1.0 - band:
            members.append(cell)
            witnesses[cell.index_set] = point
        elif gmin >= 1.0 + band:
            dropped.append(cell.index_set)
        else:
            degenerate.append(cell.index_set)

    members.sort(key=lambda c: (c.dimension, sorted(c.index_set)))

    return TruncatedComplex(
        centers=centers,
        parent=dl,
        cells=members,
        witnesses=witnesses,
        dropped=dropped,
        degenerate_sets=degenerate,
    )


def _co_feature_min(
    cell: DelaunayCell, vor: VoronoiComplex, pts: NDArrayFloat
) -> tuple[float | None, NDArrayFloat | None]:
    """Minimum of g over the Voronoi co-feature of a Delaunay cell."""
    iset = cell.index_set
    if cell.dimension == 3:
        # co-feature is a single point: the witness sphere center
        feature = next((f for f in vor.vertices if f.index_set == iset), None)
        if feature is not None:
            p = feature.point
        else:
            p = np.asarray(cell.witness_center)
        return float(kernels.max_dist_to_centers(np.ascontiguousarray(p), pts)), p
    if cell.dimension == 2:
        feature = next((f for f in vor.edges if f.index_set == iset), None)
        if feature is None:
            return None, None
        g, x, _t = _min_g_on_edge(feature, pts)
        return g, x
    if cell.dimension == 1:
        feature = next((f for f in vor.faces if f.index_set == iset), None)
        if feature is None:
            return None, None
        got = _min_g_on_face(feature, vor, pts)
        if got is None:
            return None, None
        return got
    # dimension 0: minimize over the full farthest cell of one center
    (i,) = tuple(iset)
    vcell = vor.cells[i]
    m, r = min_enclosing_ball(pts)
    if vcell.contains(m, slack=1e-9):
        return float(r), m
    # unconstrained minimum sits outside the cell, so the constrained one
    # lies on the cell boundary: scan incident faces, edges and vertices
    best = _sub_feature_min(iset, vor, pts)
    for f in vor.faces:
        if iset < f.index_set:
            got = _min_g_on_face(f, vor, pts)
            if got is not None and (best is None or got[0] < best[0]):
                best = got
    if best is None:
        return None, None
    return best


# ---------------------------------------------------------------------------
# boundary-vertex and tangency screening


@dataclass
class BoundaryVertexReport:
    skipped: bool
    reason: str
    violations: list[str]
    min_vertex_margin: float
    min_edge_margin: float

    @property
    def ok(self) -> bool:
        return not self.skipped and not self.violations


def check_no_boundary_vertex(
    vor: VoronoiComplex, poly: BallPolyhedron
) -> BoundaryVertexReport:
    """No tiling vertex may sit on the boundary, no tiling edge may touch it.

    Tangency can only happen from outside: g is convex along an edge, so an
    interior minimum at exactly 1 is a touch point, while a crossing dips
    strictly below 1 and is legitimate.
    """
    eps = vor.centers.tol.eps_geom
    if not is_simple(poly):
        return BoundaryVertexReport(
            skipped=True,
            reason="precondition not met: not simple",
            violations=[],
            min_vertex_margin=np.nan,
            min_edge_margin=np.nan,
        )
    pts = vor.centers.points
    violations: list[str] = []
    v_margin = np.inf
    for f in vor.vertices:
        g = float(kernels.max_dist_to_centers(np.ascontiguousarray(f.point), pts))
        v_margin = min(v_margin, abs(g - 1.0))
        if abs(g - 1.0) <= eps:
            violations.append(f"tiling vertex {sorted(f.index_set)} lies on the boundary")
    e_margin = np.inf
    for f in vor.edges:
        g, _x, t = _min_g_on_edge(f, pts)
        interior = f.t_lo + 1e-9 < t < f.t_hi - 1e-9
        if interior:
            e_margin = min(e_margin, abs(g - 1.0))
            if abs(g - 1.0) <= eps:
                violations.append(
                    f"tiling edge {sorted(f.index_set)} is tangent to the boundary"
                )
    return BoundaryVertexReport(
        skipped=False,
        reason="",
        violations=violations,
        min_vertex_margin=float(v_margin),
        min_edge_margin=float(e_margin),
    )


# ---------------------------------------------------------------------------
# the union polyhedron and its boundary complex


@dataclass
class UnionPolyhedron:
    """Union of the 3-dimensional truncated cells with all their faces."""

    centers: CenterSet
    cells: list[DelaunayCell]
    facet_owners: dict[frozenset[int], list[frozenset[int]]]
    boundary_faces: list[frozenset[int]]
    boundary_edges: list[frozenset[int]]
    vertex_indices: list[int]

    @property
    def boundary_vertex_indices(self) -> list[int]:
        out: set[int] = set()
        for f in self.boundary_faces:
            out.update(f)
        return sorted(out)

    @property
    def boundary_f_vector(self) -> tuple[int, int, int]:
        return (
            len(self.boundary_vertex_indices),
            len(self.boundary_edges),
            len(self.boundary_faces),
        )


def _facet_sets(pts: NDArrayFloat, idx: list[int]) -> list[frozenset[int]]:
    """Facets of conv(pts[idx]) as index sets, coplanar simplices merged."""
    hull = ConvexHull(pts[idx])
    seen: dict[tuple, frozenset[int]] = {}
    for eq in hull.equations:
        key = tuple(np.round(eq, 7))
        if key in seen:
            continue
        on_plane = frozenset(
            idx[k]
            for k in range(len(idx))
            if abs(eq[:3] @ pts[idx[k]] + eq[3]) < 1e-9
        )
        seen[key] = on_plane
    # distinct planes can collide after rounding only if they are the same
    return sorted(set(seen.values()), key=sorted)


def _polygon_edge_sets(pts: NDArrayFloat, facet: frozenset[int]) -> list[frozenset[int]]:
    """Edges of one (convex, planar) facet as index pairs."""
    idx = sorted(facet)
    if len(idx) == 3:
        return [frozenset(p) for p in itertools.combinations(idx, 2)]
    P = pts[idx]
    centroid = P.mean(axis=0)
    # order around the facet plane
    centered = P - centroid
    _u, _s, vt = np.linalg.svd(centered)
    u, v = vt[0], vt[1]
    ang = np.arctan2(centered @ v, centered @ u)
    order = [idx[k] for k in np.argsort(ang)]
    m = len(order)
    return [frozenset((order[k], order[(k + 1) % m])) for k in range(m)]


def extract_polyhedron(dt: TruncatedComplex) -> UnionPolyhedron:
    """Drop hanging cells: keep the 3-dimensional members and their faces."""
    cells3 = dt.of_dimension(3)
    if not cells3:
        raise TruncationError("no 3-cell")
    pts = dt.centers.points
    facet_owners: dict[frozenset[int], list[frozenset[int]]] = {}
    for cell in cells3:
        for facet in _facet_sets(pts, sorted(cell.index_set)):
            facet_owners.setdefault(facet, []).append(cell.index_set)
    for facet, owners in facet_owners.items():
        if len(owners) > 2:
            raise ConsistencyError(
                f"facet {sorted(facet)} belongs to {len(owners)} cells"
            )
    boundary_faces = sorted(
        (f for f, owners in facet_owners.items() if len(owners) == 1), key=sorted
    )
    boundary_edges: set[frozenset[int]] = set()
    for facet in boundary_faces:
        boundary_edges.update(_polygon_edge_sets(pts, facet))
    vertex_indices = sorted(set().union(*(c.index_set for c in cells3)))
    return UnionPolyhedron(
        centers=dt.centers,
        cells=cells3,
        facet_owners=facet_owners,
        boundary_faces=boundary_faces,
        boundary_edges=sorted(boundary_edges, key=sorted),
        vertex_indices=vertex_indices,
    )


@dataclass
class SubcomplexReport:
    ok: bool
    missing: list[str]


def check_subcomplex(dt: TruncatedComplex) -> SubcomplexReport:
    """Members must form a complex: every face of a member is a member.

    Faces of a polytopal cell here means its facets, their edges, and
    vertices, all realized as index sets.
    """
    pts = dt.centers.points
    missing: list[str] = []

    def require(iset: frozenset[int], parent: frozenset[int]) -> None:
        if iset not in dt:
            missing.append(f"{sorted(iset)} (face of {sorted(parent)})")

    for cell in dt.cells:
        if cell.index_set not in dt.parent.by_set:
            missing.append(f"{sorted(cell.index_set)} missing from the parent complex")
        idx = sorted(cell.index_set)
        if cell.dimension == 3:
            for facet in _facet_sets(pts, idx):
                require(facet, cell.index_set)
                for edge in _polygon_edge_sets(pts, facet):
                    require(edge, cell.index_set)
        elif cell.dimension == 2:
            for edge in _polygon_edge_sets(pts, cell.index_set):
                require(edge, cell.index_set)
        elif cell.dimension == 1:
            pass
        for i in idx:
            require(frozenset((i,)), cell.index_set)

    # 2-cells with more than 3 vertices have interior points of their own
    # edge set; restrict edge requirement to actual polygon boundary above.
    uniq = sorted(set(missing))
    return SubcomplexReport(ok=not uniq, missing=uniq)


# ---------------------------------------------------------------------------
# boundary triangles against the ball-polyhedron's vertices


@dataclass
class BoundaryTriangleReport:
    ok: bool
    all_triangles: bool
    missing_for_vertices: list[str]
    extra_triangles: list[str]
    triangle_count: int
    vertex_count: int


def check_boundary_triangles(
    up: UnionPolyhedron, poly: BallPolyhedron
) -> BoundaryTriangleReport:
    """Triangles of the boundary pair off with vertices of the body."""
    triangles = [f for f in up.boundary_faces if len(f) == 3]
    all_triangles = len(triangles) == len(up.boundary_faces)
    tri_sets = set(triangles)
    vert_sets = [frozenset(v.labels) for v in poly.vertices]
    missing = [str(sorted(s)) for s in vert_sets if s not in tri_sets]
    extra = [str(sorted(s)) for s in tri_sets if s not in set(vert_sets)]
    # a bijection needs distinct label sets on the vertex side too
    duplicates = len(vert_sets) != len(set(vert_sets))
    ok = all_triangles and not missing and not extra and not duplicates
    return BoundaryTriangleReport(
        ok=ok,
        all_triangles=all_triangles,
        missing_for_vertices=missing,
        extra_triangles=extra,
        triangle_count=len(triangles),
        vertex_count=len(vert_sets),
    )


# ---------------------------------------------------------------------------
# nerves and the sphere check


@dataclass
class Nerve:
    simplices: set[frozenset[int]]

    @property
    def dimension(self) -> int:
        return max(len(s) for s in self.simplices) - 1

    def edge_property(self) -> bool:
        """Every 1-simplex must be contained in some 2-simplex."""
        two = [s for s in self.simplices if len(s) == 3]
        for e in (s for s in self.simplices if len(s) == 2):
            if not any(e <= t for t in two):
                return False
        return True


def nerve_of_faces(poly: BallPolyhedron) -> Nerve:
    """Intersection pattern of the faces, indexed by their center indices."""
    simplices: set[frozenset[int]] = set()
    for f in poly.faces:
        simplices.add(frozenset((f.center_index,)))
    for e in poly.edges:
        simplices.add(frozenset(e.pair))
    for v in poly.vertices:
        labels = sorted(v.labels)
        for size in range(2, len(labels) + 1):
            for sub in itertools.combinations(labels, size):
                simplices.add(frozenset(sub))
    return Nerve(simplices=simplices)


def _two_sphere_checks(triangles: list[frozenset[int]]) -> tuple[bool, list[str], int]:
    """Closed + links are single cycles + Euler 2 + connected + orientable."""
    problems: list[str] = []
    tris = [tuple(sorted(t)) for t in triangles]
    if len(set(tris)) != len(tris):
        problems.append("repeated triangle")
    edge_count: dict[tuple[int, int], int] = {}
    for t in tris:
        for e in itertools.combinations(t, 2):
            edge_count[e] = edge_count.get(e, 0) + 1
    for e, k in edge_count.items():
        if k != 2:
            problems.append(f"edge {list(e)} lies in {k} triangles")
    vertices = sorted({v for t in tris for v in t})
    euler = len(vertices) - len(edge_count) + len(tris)
    if euler != 2:
        problems.append(f"Euler characteristic {euler}")

    # vertex links must be single cycles
    for v in vertices:
        incident = [t for t in tris if v in t]
        neighbor_edges = [tuple(sorted(set(t) - {v})) for t in incident]
        deg: dict[int, int] = {}
        for a, b in neighbor_edges:
            deg[a] = deg.get(a, 0) + 1
            deg[b] = deg.get(b, 0) + 1
        if any(d != 2 for d in deg.values()):
            problems.append(f"link of {v} is not a cycle")
            continue
        # connectivity of the link
        adj: dict[int, list[int]] = {}
        for a, b in neighbor_edges:
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        start = next(iter(adj))
        seen = {start}
        stack = [start]
        while stack:
            cur = stack.pop()
            for nxt in adj[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        if len(seen) != len(adj):
            problems.append(f"link of {v} is disconnected")

    # connectivity of the surface
    if tris:
        adj_t: dict[int, list[int]] = {k: [] for k in range(len(tris))}
        by_edge: dict[tuple[int, int], list[int]] = {}
        for k, t in enumerate(tris):
            for e in itertools.combinations(t, 2):
                by_edge.setdefault(e, []).append(k)
        for e, ks in by_edge.items():
            for a in ks:
                for b in ks:
                    if a != b:
                        adj_t[a].append(b)
        seen_t = {0}
        stack = [0]
        while stack:
            cur = stack.pop()
            for nxt in adj_t[cur]:
                if nxt not in seen_t:
                    seen_t.add(nxt)
                    stack.append(nxt)
        if len(seen_t) != len(tris):
            problems.append("surface is disconnected")

        # orientability: propagate orientations, demand opposite traversal
        # of every shared edge
        oriented: dict[int, tuple[int, int, int]] = {0: tris[0]}
        stack = [0]
        ok_orient = True
        while stack and ok_orient:
            cur = stack.pop()
            a, b, c = oriented[cur]
            directed = {(a, b), (b, c), (c, a)}
            for e, ks in by_edge.items():
                if cur not in ks or len(ks) != 2:
                    continue
                other = ks[0] if ks[1] == cur else ks[1]
                u, v = e
                want = (v, u) if (u, v) in directed else (u, v)
                x, y, z = tris[other]
                w = ({x, y, z} - {u, v}).pop()
                cand = (want[0], want[1], w)
                if other in oriented:
                    p, q, r = oriented[other]
                    cycle = {(p, q), (q, r), (r, p)}
                    if (want[0], want[1]) not in cycle:
                        problems.append("surface is not orientable")
                        ok_orient = False
                        break
                else:
                    oriented[other] = cand
                    stack.append(other)

    return (not problems, problems, euler)


@dataclass
class NerveReport:
    is_isomorphic: bool
    sphere_ok: bool
    euler_characteristic: int
    violations: list[str]

    @property
    def ok(self) -> bool:
        return self.is_isomorphic and self.sphere_ok


def boundary_complex(up: UnionPolyhedron) -> set[frozenset[int]]:
    """Simplicial complex generated by the boundary triangles."""
    simplices: set[frozenset[int]] = set()
    for f in up.boundary_faces:
        idx = sorted(f)
        for size in range(1, len(idx) + 1):
            for sub in itertools.combinations(idx, size):
                simplices.add(frozenset(sub))
    return simplices


def check_nerve_isomorphism(up: UnionPolyhedron, poly: BallPolyhedron) -> NerveReport:
    """Identity on center indices must map the boundary complex to the nerve."""
    violations: list[str] = []
    non_triangles = [f for f in up.boundary_faces if len(f) != 3]
    if non_triangles:
        violations.append(
            f"{len(non_triangles)} boundary faces are not triangles"
        )
    s_complex = boundary_complex(up)
    nerve = nerve_of_faces(poly).simplices
    for s in sorted(s_complex - nerve, key=sorted):
        violations.append(f"boundary simplex {sorted(s)} is not in the nerve")
    for s in sorted(nerve - s_complex, key=sorted):
        violations.append(f"nerve simplex {sorted(s)} is not in the boundary complex")
    is_isomorphic = not violations

    triangles = [f for f in up.boundary_faces if len(f) == 3]
    sphere_ok, sphere_problems, euler = _two_sphere_checks(triangles)
    violations.extend(sphere_problems)
    return NerveReport(
        is_isomorphic=is_isomorphic,
        sphere_ok=sphere_ok,
        euler_characteristic=euler,
        violations=violations,
    )
