"""Infinitesimal rigidity of bar frameworks, plus the convexity-side checks.

A framework is a finite point set joined by edges. An infinitesimal flex
assigns a velocity to every vertex so that all edge lengths are stationary
to first order; rigid motions always qualify, and the framework is
infinitesimally rigid when nothing else does. With m vertices spanning
3-space the rigid motions contribute exactly 6 kernel dimensions, so
rigidity reduces to: nullity of the rigidity matrix equals 6.

Rank decisions are numerical. Singular values close to the cut threshold
make the nullity a coin flip, so such spectra are reported ill-conditioned
and left undecided rather than silently rounded either way.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.spatial import ConvexHull

from .errors import CodecompositionError, ConsistencyError, DegenerateSpanError
from .truncation import UnionPolyhedron
from .voronoi import DelaunayComplex

NDArrayFloat = NDArray[np.float64]

# singular values within this factor of the rank threshold are borderline
CONDITION_GUARD = 10.0


@dataclass(frozen=True)
class Framework:
    """Points in 3-space with straight bars between some pairs."""

    positions: NDArrayFloat
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3 or pos.shape[0] < 1:
            raise ValueError("positions must be an m x 3 array with m >= 1")
        object.__setattr__(self, "positions", pos)
        m = pos.shape[0]
        seen: set[tuple[int, int]] = set()
        norm: list[tuple[int, int]] = []
        for i, j in self.edges:
            if i == j:
                raise ValueError(f"edge ({i}, {j}) joins a vertex to itself")
            if not (0 <= i < m and 0 <= j < m):
                raise ValueError(f"edge ({i}, {j}) out of range for {m} vertices")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"repeated edge {key}")
            seen.add(key)
            norm.append(key)
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def vertex_count(self) -> int:
        return int(self.positions.shape[0])


def affine_span_dimension(points: NDArrayFloat, rel_tol: float = 1e-9) -> int:
    pts = np.asarray(points, dtype=float)
    if pts.shape[0] <= 1:
        return 0
    centered = pts - pts.mean(axis=0)
    s = np.linalg.svd(centered, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


@dataclass
class RigidityMatrixData:
    matrix: NDArrayFloat
    singular_values: NDArrayFloat
    rank: int
    nullity: int
    kernel: NDArrayFloat  # (nullity, 3m), orthonormal rows
    threshold: float
    ill_conditioned: bool

    def __post_init__(self) -> None:
        if self.rank + self.nullity != self.matrix.shape[1]:
            raise ConsistencyError("rank + nullity must equal the column count")


def rigidity_matrix(fw: Framework, eps_rank: float = 1e-8) -> RigidityMatrixData:
    """Edge-length Jacobian of the framework, with its numeric rank data.

    Row for edge (i, j) carries p_i - p_j in block i and the negative in
    block j, so R q = 0 says every edge length is stationary under the
    velocity assignment q.
    """
    pos = fw.positions
    m = fw.vertex_count
    rows = max(len(fw.edges), 0)
    R = np.zeros((rows, 3 * m))
    for r, (i, j) in enumerate(fw.edges):
        d = pos[i] - pos[j]
        R[r, 3 * i : 3 * i + 3] = d
        R[r, 3 * j : 3 * j + 3] = -d

    if rows == 0:
        return RigidityMatrixData(
            matrix=R,
            singular_values=np.zeros(0),
            rank=0,
            nullity=3 * m,
            kernel=np.eye(3 * m),
            threshold=0.0,
            ill_conditioned=False,
        )

    _u, s, vt = np.linalg.svd(R)
    threshold = eps_rank * float(s[0]) if s[0] > 0 else eps_rank
    rank = int(np.sum(s > threshold))
    nullity = 3 * m - rank
    borderline = bool(
        np.any((s > threshold / CONDITION_GUARD) & (s < threshold * CONDITION_GUARD))
    )
    kernel = vt[rank:, :].copy()
    return RigidityMatrixData(
        matrix=R,
        singular_values=s,
        rank=rank,
        nullity=nullity,
        kernel=kernel,
        threshold=threshold,
        ill_conditioned=borderline,
    )


def trivial_motions(positions: NDArrayFloat) -> NDArrayFloat:
    """Orthonormal basis of the rigid-motion velocity space, shape (k, 3m).

    Three translations plus three infinitesimal rotations q_i = w x p_i;
    k = 6 exactly when the points affinely span 3-space.
    """
    pos = np.asarray(positions, dtype=float)
    m = pos.shape[0]
    gens = []
    for axis in np.eye(3):
        gens.append(np.tile(axis, m))
    for axis in np.eye(3):
        gens.append(np.cross(np.broadcast_to(axis, (m, 3)), pos).ravel())
    G = np.array(gens).T  # (3m, 6)
    q, r = np.linalg.qr(G)
    keep = np.abs(np.diag(r)) > 1e-12 * max(1.0, float(np.abs(r).max()))
    return q[:, keep].T.copy()


@dataclass
class FlexBasis:
    """Orthonormal kernel basis, each row reshaped to one vector per vertex."""

    vectors: NDArrayFloat  # (k, m, 3)

    @property
    def count(self) -> int:
        return int(self.vectors.shape[0])

    def flat(self) -> NDArrayFloat:
        return self.vectors.reshape(self.count, -1)


def nontrivial_residual(flex_flat: NDArrayFloat, trivial_basis: NDArrayFloat) -> float:
    """Distance from a unit flex to the rigid-motion subspace."""
    v = np.asarray(flex_flat, dtype=float)
    n = float(np.linalg.norm(v))
    if n == 0.0:
        return 0.0
    v = v / n
    proj = trivial_basis.T @ (trivial_basis @ v)
    return float(np.linalg.norm(v - proj))


@dataclass
class RigidityReport:
    rigid: bool | None  # None when the spectrum is too borderline to decide
    nullity: int
    ill_conditioned: bool
    flexes: FlexBasis
    trivial_basis: NDArrayFloat
    matrix_data: RigidityMatrixData

    @property
    def nontrivial_flex_residuals(self) -> list[float]:
        return [
            nontrivial_residual(row, self.trivial_basis)
            for row in self.flexes.flat()
        ]


def is_infinitesimally_rigid(fw: Framework, eps_rank: float = 1e-8) -> RigidityReport:
    """Decide rigidity by kernel dimension; 6 means rigid motions only."""
    if affine_span_dimension(fw.positions) < 3:
        raise DegenerateSpanError(
            "framework vertices do not affinely span 3-space; "
            "rigidity in the ambient space is not decided by nullity 6"
        )
    data = rigidity_matrix(fw, eps_rank=eps_rank)
    m = fw.vertex_count
    flexes = FlexBasis(vectors=data.kernel.reshape(-1, m, 3).copy())
    trivial = trivial_motions(fw.positions)
    if trivial.shape[0] != 6:
        raise ConsistencyError("rigid-motion space is not 6-dimensional")
    rigid: bool | None
    if data.ill_conditioned:
        rigid = None
    else:
        rigid = data.nullity == 6
    return RigidityReport(
        rigid=rigid,
        nullity=data.nullity,
        ill_conditioned=data.ill_conditioned,
        flexes=flexes,
        trivial_basis=trivial,
        matrix_data=data,
    )


def flex_length_derivative(fw: Framework, flex: NDArrayFloat) -> float:
    """Largest first-order edge-length change rate under a velocity field.

    For edge (i, j) the derivative of |p_i - p_j| along the flex is
    (p_i - p_j) . (q_i - q_j) / |p_i - p_j|.
    """
    q = np.asarray(flex, dtype=float).reshape(fw.vertex_count, 3)
    worst = 0.0
    for i, j in fw.edges:
        d = fw.positions[i] - fw.positions[j]
        length = float(np.linalg.norm(d))
        worst = max(worst, abs(float(d @ (q[i] - q[j]))) / length)
    return worst


def flex_length_derivative_fd(
    fw: Framework, flex: NDArrayFloat, h: float = 1e-6
) -> float:
    """Finite-difference twin of flex_length_derivative (central, step h)."""
    q = np.asarray(flex, dtype=float).reshape(fw.vertex_count, 3)
    worst = 0.0
    for i, j in fw.edges:
        plus = np.linalg.norm((fw.positions[i] + h * q[i]) - (fw.positions[j] + h * q[j]))
        minus = np.linalg.norm((fw.positions[i] - h * q[i]) - (fw.positions[j] - h * q[j]))
        worst = max(worst, abs(float(plus - minus)) / (2.0 * h))
    return worst


# ---------------------------------------------------------------------------
# convexity-side hypotheses on the union polyhedron


@dataclass
class WeakConvexityReport:
    ok: bool
    interior_vertices: list[int]  # vertices that fail to be hull vertices


def check_weakly_convex(q: UnionPolyhedron | NDArrayFloat) -> WeakConvexityReport:
    """All vertices in convex position: each one is a hull vertex."""
    if isinstance(q, UnionPolyhedron):
        indices = list(q.vertex_indices)
        pts = q.centers.points[indices]
    else:
        pts = np.asarray(q, dtype=float)
        indices = list(range(pts.shape[0]))
    hull = ConvexHull(pts)
    on_hull = set(hull.vertices.tolist())
    interior = [indices[k] for k in range(pts.shape[0]) if k not in on_hull]
    return WeakConvexityReport(ok=not interior, interior_vertices=interior)


def _tetra_volume(a, b, c, d) -> float:
    return abs(float(np.linalg.det(np.array([b - a, c - a, d - a])))) / 6.0


@dataclass
class CodecompositionReport:
    ok: bool
    complement_sets: list[frozenset[int]]
    witness: dict[frozenset[int], list[tuple[int, int, int, int]]]


def check_codecomposable(
    q: UnionPolyhedron, dl: DelaunayComplex
) -> CodecompositionReport:
    """Triangulate the complement of the union inside the hull, vertex-only.

    The parent tiling's 3-cells cover the hull of the centers, so the
    complement is exactly the dropped 3-cells. Each is a convex polytope on
    center points; a fan from one vertex triangulates it without new
    vertices, and the tetra volumes must re-add to the cell volume.
    """
    pts = q.centers.points
    member_sets = {c.index_set for c in q.cells}
    complement = [
        c.index_set for c in dl.of_dimension(3) if c.index_set not in member_sets
    ]
    witness: dict[frozenset[int], list[tuple[int, int, int, int]]] = {}
    for iset in complement:
        idx = sorted(iset)
        hull = ConvexHull(pts[idx])
        if set(hull.vertices.tolist()) != set(range(len(idx))):
            raise CodecompositionError(
                f"complement cell {idx} not in convex position"
            )
        apex_local = 0
        apex = idx[apex_local]
        tets: list[tuple[int, int, int, int]] = []
        vol = 0.0
        for tri in hull.simplices:
            if apex_local in tri:
                continue
            a, b, c = (idx[t] for t in tri)
            tets.append((apex, a, b, c))
            vol += _tetra_volume(pts[apex], pts[a], pts[b], pts[c])
        if abs(vol - hull.volume) > 1e-9 * max(1.0, hull.volume):
            raise ConsistencyError(
                f"fan volume {vol} disagrees with hull volume {hull.volume}"
            )
        witness[iset] = tets
    return CodecompositionReport(
        ok=True, complement_sets=complement, witness=witness
    )


def boundary_framework(q: UnionPolyhedron) -> tuple[Framework, list[int]]:
    """Framework of the boundary edge graph, plus the center-index map."""
    indices = q.boundary_vertex_indices
    to_local = {g: k for k, g in enumerate(indices)}
    edges = tuple(
        (to_local[a], to_local[b])
        for a, b in (sorted(e) for e in q.boundary_edges)
    )
    return Framework(positions=q.centers.points[indices], edges=edges), indices
