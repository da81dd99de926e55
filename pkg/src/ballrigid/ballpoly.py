"""Ball-polyhedra: intersections of unit balls and their boundary structure.

A center set C defines P = the intersection of the closed unit balls around
its points.  This module decides whether P has interior, reduces C to the
centers that actually contribute a 2-dimensional face, assembles the full
vertex / edge / face structure of the boundary, decides simplicity and
standardness, and builds the dual ball-polyhedron on the vertex set.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import (
    ConsistencyError,
    DegenerateConfigurationError,
    DualityError,
    EmptyInteriorError,
    NotReducedError,
)
from .geom import (
    DEFAULT_TOLERANCE,
    Arc3,
    Circle3,
    NDArrayFloat,
    Tolerance,
    min_enclosing_ball,
    sphere_pair_circle,
    triple_points,
)

TWO_PI = 2.0 * np.pi

__all__ = [
    "CenterSet",
    "BPVertex",
    "BPEdge",
    "BPFace",
    "BallPolyhedron",
    "has_interior",
    "reduce_centers",
    "build",
    "is_simple",
    "is_standard",
    "dual",
    "face_interior_point",
]


class CenterSet:
    """An ordered family of distinct unit-ball centers with labels and tolerances."""

    def __init__(self, points, labels=None, tol: Tolerance = DEFAULT_TOLERANCE):
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 1:
            raise ValueError(f"expected an (n, 3) array with n >= 1, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("non-finite center coordinate")
        n = pts.shape[0]
        if labels is None:
            labels = tuple(f"c{i + 1}" for i in range(n))
        else:
            labels = tuple(str(s) for s in labels)
            if len(labels) != n:
                raise ValueError("label count does not match center count")
            if len(set(labels)) != n:
                raise ValueError("duplicate labels")
        for i in range(n):
            for j in range(i + 1, n):
                if np.linalg.norm(pts[i] - pts[j]) <= tol.eps_geom:
                    raise ValueError(f"coincident centers {labels[i]!r} and {labels[j]!r}")
        pts.setflags(write=False)
        self.points: NDArrayFloat = pts
        self.labels: tuple[str, ...] = labels
        self.tol = tol
        # relative-interior face points, attached by reduce_centers when available
        self.face_witnesses: dict[int, NDArrayFloat] | None = None

    def __len__(self) -> int:
        return self.points.shape[0]

    def subset(self, indices) -> "CenterSet":
        idx = list(indices)
        return CenterSet(self.points[idx], [self.labels[i] for i in idx], self.tol)

    def __repr__(self) -> str:
        return f"CenterSet(n={len(self)})"


def has_interior(centers: CenterSet) -> bool:
    """True iff the intersection of the unit balls contains an open ball of radius eps_geom.

    The max-distance function x -> max_i |x - c_i| is convex and its minimum
    is the radius of the smallest enclosing ball of the centers, so the
    intersection has interior exactly when that radius stays below 1.
    """
    _, radius = min_enclosing_ball(centers.points)
    return radius < 1.0 - centers.tol.eps_geom


def _interior_point(centers: CenterSet) -> NDArrayFloat:
    center, radius = min_enclosing_ball(centers.points)
    if radius >= 1.0 - centers.tol.eps_geom:
        raise EmptyInteriorError("not a ball-polyhedron")
    return center


def _farthest_point_in_intersection(
    pts: NDArrayFloat, target: NDArrayFloat, tol: Tolerance
) -> tuple[float, NDArrayFloat | None]:
    """Maximum of |x - target| over the intersection of unit balls at ``pts``.

    The maximizer of a convex function over the intersection lies on the
    boundary with the gradient in the active normal cone, so it is covered by
    candidates with 1, 2 or 3 active spheres: per-ball antipodes, farthest
    points of pair circles, and triple points.  Returns (max, argmax).
    """
    m = pts.shape[0]
    candidates: list[NDArrayFloat] = []
    for j in range(m):
        d = np.linalg.norm(pts[j] - target)
        if d > tol.eps_geom:
            candidates.append(pts[j] + (pts[j] - target) / d)
    for j in range(m):
        for k in range(j + 1, m):
            circle = sphere_pair_circle(pts[j], pts[k], tol)
            if circle is None:
                continue
            if circle.radius == 0.0:
                candidates.append(circle.center)
                continue
            w = target - circle.center
            w_plane = w - np.dot(w, circle.normal) * circle.normal
            wn = np.linalg.norm(w_plane)
            if wn <= tol.eps_geom:
                u, _ = circle.axes()
                candidates.append(circle.center + circle.radius * u)
            else:
                candidates.append(circle.center - circle.radius * (w_plane / wn))
    for j in range(m):
        for k in range(j + 1, m):
            for l in range(k + 1, m):
                try:
                    candidates.extend(triple_points(pts[j], pts[k], pts[l], tol))
                except DegenerateConfigurationError:
                    continue
    best_val = -np.inf
    best_pt: NDArrayFloat | None = None
    feas = 1.0 + 10.0 * tol.eps_geom
    for x in candidates:
        if kernels.max_dist_to_centers(x, pts) <= feas:
            v = float(np.linalg.norm(x - target))
            if v > best_val:
                best_val = v
                best_pt = x
    return best_val, best_pt


def reduce_centers(centers: CenterSet) -> CenterSet:
    """Drop every ball whose face contributes no 2-dimensional boundary piece.

    A center survives iff some point of its sphere lies strictly inside all
    other balls.  Equivalently the intersection of the *other* balls reaches
    distance > 1 from the center; candidates for that farthest point are
    enumerated exactly (see ``_farthest_point_in_intersection``).  The
    returned set carries a relative-interior witness point for each face.
    """
    tol = centers.tol
    y = _interior_point(centers)  # raises EmptyInteriorError when degenerate
    n = len(centers)
    if n == 1:
        out = centers.subset([0])
        out.face_witnesses = {0: centers.points[0] + np.array([1.0, 0.0, 0.0])}
        return out

    survivors: list[int] = []
    witnesses: dict[int, NDArrayFloat] = {}
    for i in range(n):
        others = [j for j in range(n) if j != i]
        pts = centers.points[others]
        max_dist, x = _farthest_point_in_intersection(pts, centers.points[i], tol)
        if abs(max_dist - 1.0) <= tol.eps_geom:
            raise DegenerateConfigurationError(
                f"face of center {centers.labels[i]!r} is tangential within tolerance"
            )
        if max_dist < 1.0:
            continue
        # crossing point of [y, x] with the sphere around c_i certifies a
        # relative-interior face point (strictly inside every other ball)
        ci = centers.points[i]
        dvec = x - y
        a = float(np.dot(dvec, dvec))
        b = 2.0 * float(np.dot(y - ci, dvec))
        c = float(np.dot(y - ci, y - ci)) - 1.0
        disc = b * b - 4.0 * a * c
        s = (-b + np.sqrt(max(disc, 0.0))) / (2.0 * a)
        z = y + s * dvec
        survivors.append(i)
        witnesses[len(survivors) - 1] = z
    if not survivors:
        raise ConsistencyError("reduction removed every center")
    out = centers.subset(survivors)
    out.face_witnesses = witnesses
    return out


def face_interior_point(centers: CenterSet, i: int) -> NDArrayFloat:
    """A point on sphere ``i`` strictly inside all other balls.

    Uses the witness cached by ``reduce_centers`` when present, otherwise
    recomputes it; raises ``NotReducedError`` when the face is empty.
    """
    if centers.face_witnesses is not None and i in centers.face_witnesses:
        return centers.face_witnesses[i]
    tol = centers.tol
    if len(centers) == 1:
        return centers.points[0] + np.array([1.0, 0.0, 0.0])
    y = _interior_point(centers)
    others = [j for j in range(len(centers)) if j != i]
    pts = centers.points[others]
    max_dist, x = _farthest_point_in_intersection(pts, centers.points[i], tol)
    if max_dist <= 1.0 + tol.eps_geom:
        raise NotReducedError("not reduced")
    ci = centers.points[i]
    dvec = x - y
    a = float(np.dot(dvec, dvec))
    b = 2.0 * float(np.dot(y - ci, dvec))
    c = float(np.dot(y - ci, y - ci)) - 1.0
    disc = b * b - 4.0 * a * c
    s = (-b + np.sqrt(max(disc, 0.0))) / (2.0 * a)
    return y + s * dvec


@dataclass
class BPVertex:
    """Boundary point on at least three of the generating spheres."""

    position: NDArrayFloat
    labels: tuple[int, ...]  # sorted center indices at distance 1


@dataclass
class BPEdge:
    """Non-degenerate circular arc where two faces meet.

    ``pair`` is the sorted center-index pair; the arc runs counterclockwise
    around the circle normal, which points from the lower-index center to the
    higher one.  Full-circle edges have no endpoint vertices.
    """

    pair: tuple[int, int]
    arc: Arc3
    v_start: int | None
    v_end: int | None

    @property
    def full(self) -> bool:
        return self.arc.full


@dataclass
class BPFace:
    """The 2-dimensional piece of one generating sphere on the boundary.

    ``cycles`` lists boundary cycles as sequences of (edge index, forward)
    pairs, oriented counterclockwise as seen from outside the sphere.
    """

    center_index: int
    cycles: list[list[tuple[int, bool]]] = field(default_factory=list)


class BallPolyhedron:
    """Assembled boundary structure of an intersection of unit balls."""

    def __init__(
        self,
        centers: CenterSet,
        vertices: list[BPVertex],
        edges: list[BPEdge],
        faces: list[BPFace],
    ):
        self.centers = centers
        self.vertices = vertices
        self.edges = edges
        self.faces = faces
        # incidence maps
        self.vertex_edges: list[list[int]] = [[] for _ in vertices]
        for e_id, e in enumerate(edges):
            for v in (e.v_start, e.v_end):
                if v is not None and e_id not in self.vertex_edges[v]:
                    self.vertex_edges[v].append(e_id)
        self.face_vertices: list[set[int]] = []
        self.face_edges: list[set[int]] = []
        for f in faces:
            vs: set[int] = set()
            es: set[int] = set()
            for cycle in f.cycles:
                for e_id, _fwd in cycle:
                    es.add(e_id)
                    e = edges[e_id]
                    if e.v_start is not None:
                        vs.add(e.v_start)
                    if e.v_end is not None:
                        vs.add(e.v_end)
            self.face_vertices.append(vs)
            self.face_edges.append(es)

    @property
    def f_vector(self) -> tuple[int, int, int]:
        return len(self.vertices), len(self.edges), len(self.faces)

    def edge_faces(self, e_id: int) -> tuple[int, int]:
        """Indices into ``faces`` of the two faces meeting along the edge."""
        pair = self.edges[e_id].pair
        lookup = {f.center_index: k for k, f in enumerate(self.faces)}
        return lookup[pair[0]], lookup[pair[1]]

    def vertex_label_sets(self) -> list[frozenset[int]]:
        return [frozenset(v.labels) for v in self.vertices]


def _cluster_points(points: list[NDArrayFloat], radius: float) -> list[list[int]]:
    """Greedy union-find clustering of points within ``radius`` of each other."""
    n = len(points)
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(i + 1, n):
            if np.linalg.norm(points[i] - points[j]) <= radius:
                ra, rb = find(i), find(j)
                if ra != rb:
                    parent[rb] = ra
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _ccw_angle(n: NDArrayFloat, a: NDArrayFloat, b: NDArrayFloat) -> float:
    """Counterclockwise angle from ``a`` to ``b`` around unit normal ``n``, in [0, 2*pi)."""
    ang = float(np.arctan2(np.dot(n, np.cross(a, b)), np.dot(a, b)))
    return ang % TWO_PI


def build(centers: CenterSet, strict: bool = False) -> BallPolyhedron:
    """Assemble the vertex/edge/face structure of the intersection of unit balls.

    Requires a reduced family with non-empty interior.  ``strict=True`` raises
    when a vertex lies on four or more spheres instead of carrying on.
    """
    tol = centers.tol
    pts = centers.points
    n = len(centers)
    if not has_interior(centers):
        raise EmptyInteriorError("not a ball-polyhedron")
    if n == 1:
        return BallPolyhedron(centers, [], [], [BPFace(center_index=0, cycles=[])])

    # --- vertices: triple points inside every ball, merged within 10*eps ---
    raw: list[NDArrayFloat] = []
    feas = 1.0 + tol.eps_geom
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                try:
                    cand = triple_points(pts[i], pts[j], pts[k], tol)
                except DegenerateConfigurationError:
                    continue
                for p in cand:
                    if kernels.max_dist_to_centers(p, pts) <= feas:
                        raw.append(p)
    merge_radius = 10.0 * tol.eps_geom
    vertices: list[BPVertex] = []
    for group in _cluster_points(raw, merge_radius):
        pos = np.mean([raw[g] for g in group], axis=0)
        dists = np.linalg.norm(pts - pos, axis=1)
        labels = tuple(int(l) for l in np.flatnonzero(np.abs(dists - 1.0) <= merge_radius))
        if len(labels) < 3:
            raise DegenerateConfigurationError("merged vertex lost sphere incidences")
        if strict and len(labels) > 3:
            raise DegenerateConfigurationError("degenerate configuration: vertex on >= 4 spheres")
        vertices.append(BPVertex(position=pos, labels=labels))
    vertices.sort(key=lambda v: tuple(np.round(v.position, 9)))

    # --- edges: arcs of pair circles bounded by the vertices on them ---
    edges: list[BPEdge] = []
    for i in range(n):
        for j in range(i + 1, n):
            circle = sphere_pair_circle(pts[i], pts[j], tol)
            if circle is None or circle.radius <= tol.eps_geom:
                continue
            others = np.array([k for k in range(n) if k != i and k != j], dtype=int)
            on_circle = [
                (circle.angle_of(v.position), v_id)
                for v_id, v in enumerate(vertices)
                if i in v.labels and j in v.labels
            ]
            if not on_circle:
                if others.size == 0:
                    inside = True
                else:
                    thetas = np.linspace(0.0, TWO_PI, 8, endpoint=False)
                    samples = np.stack([circle.point_at(t) for t in thetas])
                    d = kernels.max_dist_batch(samples, pts[others])
                    flags = d <= feas
                    if flags.all():
                        inside = True
                    elif not flags.any():
                        inside = False
                    else:
                        raise DegenerateConfigurationError(
                            "circle classification inconsistent (missed vertex?)"
                        )
                if inside:
                    arc = Arc3(circle, 0.0, TWO_PI, full=True)
                    edges.append(BPEdge(pair=(i, j), arc=arc, v_start=None, v_end=None))
                continue
            on_circle.sort()
            m = len(on_circle)
            for a in range(m):
                theta_a, va = on_circle[a]
                theta_b, vb = on_circle[(a + 1) % m]
                if (a + 1) % m == a:  # single vertex on the circle
                    theta_b = theta_a + TWO_PI
                elif theta_b <= theta_a:
                    theta_b += TWO_PI
                arc = Arc3(circle, theta_a, theta_b)
                if others.size:
                    mid = arc.midpoint()
                    if kernels.max_dist_to_centers(mid, pts[others]) > feas:
                        continue
                edges.append(BPEdge(pair=(i, j), arc=arc, v_start=va, v_end=vb))

    # --- faces: chain directed arcs into boundary cycles per sphere ---
    faces: list[BPFace] = []
    for i in range(n):
        directed: list[tuple[int, bool]] = []
        for e_id, e in enumerate(edges):
            if e.pair[0] == i:
                directed.append((e_id, True))
            elif e.pair[1] == i:
                directed.append((e_id, False))
        if not directed:
            raise NotReducedError(f"not reduced: face of {centers.labels[i]!r} has no boundary")
        cycles = _assemble_cycles(i, directed, edges, vertices, pts, tol)
        faces.append(BPFace(center_index=i, cycles=cycles))

    return BallPolyhedron(centers, vertices, edges, faces)


def _directed_endpoints(e: BPEdge, forward: bool) -> tuple[int | None, int | None]:
    return (e.v_start, e.v_end) if forward else (e.v_end, e.v_start)


def _walk_tangent(e: BPEdge, forward: bool, at_start: bool) -> NDArrayFloat:
    """Unit tangent of the directed arc at its start or end, in travel direction."""
    arc = e.arc
    theta = arc.theta_start if (forward == at_start) else arc.theta_end
    point = arc.circle.point_at(theta)
    t = arc.circle.tangent_at(point)
    return t if forward else -t


def _assemble_cycles(
    face_center: int,
    directed: list[tuple[int, bool]],
    edges: list[BPEdge],
    vertices: list[BPVertex],
    pts: NDArrayFloat,
    tol: Tolerance,
) -> list[list[tuple[int, bool]]]:
    cycles: list[list[tuple[int, bool]]] = []
    unused = set(directed)
    outgoing: dict[int, list[tuple[int, bool]]] = {}
    for item in directed:
        e = edges[item[0]]
        start, _ = _directed_endpoints(e, item[1])
        if start is not None:
            outgoing.setdefault(start, []).append(item)

    for item in sorted(directed):
        if item not in unused:
            continue
        e = edges[item[0]]
        if e.full:
            unused.discard(item)
            cycles.append([item])
            continue
        cycle = [item]
        unused.discard(item)
        first_start, cur_end = _directed_endpoints(e, item[1])
        cur = item
        while cur_end != first_start:
            candidates = [c for c in outgoing.get(cur_end, []) if c in unused]
            if not candidates:
                raise DegenerateConfigurationError("open boundary chain on face")
            if len(candidates) == 1:
                nxt = candidates[0]
            else:
                # pinch vertex: continue into the tightest wedge.  Measure the
                # counterclockwise angle (around the outward normal) from the
                # reversed incoming tangent to each outgoing tangent and take
                # the largest, which selects the minimal interior angle.
                v_pos = vertices[cur_end].position
                normal = v_pos - pts[face_center]
                normal = normal / np.linalg.norm(normal)
                t_in = _walk_tangent(edges[cur[0]], cur[1], at_start=False)
                rev = -t_in
                rev = rev - np.dot(rev, normal) * normal
                rev = rev / np.linalg.norm(rev)
                best = None
                for c in candidates:
                    t_out = _walk_tangent(edges[c[0]], c[1], at_start=True)
                    t_out = t_out - np.dot(t_out, normal) * normal
                    t_out = t_out / np.linalg.norm(t_out)
                    ang = _ccw_angle(normal, rev, t_out)
                    if best is None or ang > best[0]:
                        best = (ang, c)
                nxt = best[1]
            cycle.append(nxt)
            unused.discard(nxt)
            _, cur_end = _directed_endpoints(edges[nxt[0]], nxt[1])
            cur = nxt
        cycles.append(cycle)
    return cycles


def is_simple(poly: BallPolyhedron) -> bool:
    """True iff every vertex has exactly three incident edges."""
    return all(len(e_ids) == 3 for e_ids in poly.vertex_edges)


def is_standard(poly: BallPolyhedron) -> bool:
    """Lattice condition on the vertex-edge-face structure.

    Any two faces must intersect in nothing, one vertex, or one edge together
    with its two endpoints, and any two edges may share at most one vertex.
    A shared full circle is not an edge with endpoints, so it fails the
    condition (consistent with standardness forcing at least four balls).
    """
    if not poly.vertices:
        # no vertices means no polyhedral boundary complex at all
        return False
    n_faces = len(poly.faces)
    edges_by_pair: dict[tuple[int, int], list[int]] = {}
    for e_id, e in enumerate(poly.edges):
        edges_by_pair.setdefault(e.pair, []).append(e_id)

    for a in range(n_faces):
        for b in range(a + 1, n_faces):
            i = poly.faces[a].center_index
            j = poly.faces[b].center_index
            pair = (min(i, j), max(i, j))
            shared_edges = edges_by_pair.get(pair, [])
            shared_vertices = poly.face_vertices[a] & poly.face_vertices[b]
            if len(shared_edges) == 0:
                if len(shared_vertices) > 1:
                    return False
            elif len(shared_edges) == 1:
                e = poly.edges[shared_edges[0]]
                if e.full:
                    return False
                if shared_vertices != {e.v_start, e.v_end}:
                    return False
            else:
                return False

    edge_list = poly.edges
    for a in range(len(edge_list)):
        ea = edge_list[a]
        if ea.full:
            continue
        for b in range(a + 1, len(edge_list)):
            eb = edge_list[b]
            if eb.full:
                continue
            if len({ea.v_start, ea.v_end} & {eb.v_start, eb.v_end}) > 1:
                return False

    if len(poly.centers) < 4:
        # the lattice condition is provably unattainable below four balls;
        # reaching this line would mean the structure itself is corrupt
        raise ConsistencyError("standardness condition held with fewer than four balls")
    return True


def dual(poly: BallPolyhedron) -> BallPolyhedron:
    """Ball-polyhedron generated by the vertices, with the anti-isomorphism verified.

    Faces of the input correspond to vertices of the dual (located at the
    original centers), vertices to faces, and edges to edges with the roles of
    their defining pair and endpoints exchanged.  Any failed cross-check
    raises ``DualityError``.
    """
    if not is_standard(poly):
        raise DualityError("dual requires a standard ball-polyhedron")
    tol = poly.centers.tol
    v_positions = np.stack([v.position for v in poly.vertices])
    v_labels = [f"v{k + 1}" for k in range(len(poly.vertices))]
    dual_centers = CenterSet(v_positions, v_labels, tol)
    reduced = reduce_centers(dual_centers)
    if len(reduced) != len(dual_centers):
        raise DualityError("duality check failed: a vertex ball is redundant")
    dual_poly = build(reduced)
    if not is_standard(dual_poly):
        raise DualityError("duality check failed: dual is not standard")

    fv = poly.f_vector
    fv_dual = dual_poly.f_vector
    if (fv_dual[0], fv_dual[1], fv_dual[2]) != (fv[2], fv[1], fv[0]):
        raise DualityError(f"duality check failed: f-vector {fv} vs {fv_dual}")

    merge = 10.0 * tol.eps_geom
    # faces of P  ->  vertices of P* (located at the original centers)
    center_to_dual_vertex: dict[int, int] = {}
    for i in range(len(poly.centers)):
        ci = poly.centers.points[i]
        hits = [
            k
            for k, v in enumerate(dual_poly.vertices)
            if np.linalg.norm(v.position - ci) <= merge
        ]
        if len(hits) != 1:
            raise DualityError("duality check failed: center is not a unique dual vertex")
        center_to_dual_vertex[i] = hits[0]
    if len(set(center_to_dual_vertex.values())) != len(dual_poly.vertices):
        raise DualityError("duality check failed: center/vertex correspondence not bijective")

    # edges of P -> edges of P*: pair and endpoints swap roles
    dual_edges_by_pair: dict[tuple[int, int], list[int]] = {}
    for e_id, e in enumerate(dual_poly.edges):
        dual_edges_by_pair.setdefault(e.pair, []).append(e_id)
    used: set[int] = set()
    for e in poly.edges:
        if e.v_start is None or e.v_end is None:
            raise DualityError("duality check failed: full-circle edge in standard structure")
        key = (min(e.v_start, e.v_end), max(e.v_start, e.v_end))
        cand = dual_edges_by_pair.get(key, [])
        expected = {
            tuple(np.round(poly.centers.points[e.pair[0]], 9)),
            tuple(np.round(poly.centers.points[e.pair[1]], 9)),
        }
        match = None
        for d_id in cand:
            de = dual_poly.edges[d_id]
            got = set()
            for v_id in (de.v_start, de.v_end):
                got.add(tuple(np.round(dual_poly.vertices[v_id].position, 9)))
            if got == expected:
                match = d_id
                break
        if match is None or match in used:
            raise DualityError("duality check failed: edge correspondence broken")
        used.add(match)
    if len(used) != len(dual_poly.edges):
        raise DualityError("duality check failed: edge correspondence not bijective")

    return dual_poly
