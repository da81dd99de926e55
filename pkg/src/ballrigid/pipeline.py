"""End-to-end certification, congruence comparison, probing, and export.

certify runs the whole chain on one center set and produces a certificate:
reduce, interior test, boundary structure, simplicity and standardness,
farthest-point tiling and its nested complexes, the union polyhedron, the
seven hypothesis checks, and finally the rigidity decision on the boundary
edge graph. Every failure mode becomes a verdict string, never a silent
partial result.

compare decides whether two center sets generate combinatorially equivalent
bodies and, if so, how far they are from congruent. perturbation_probe is a
numerical experiment around a certified input: kick the centers, re-solve
for the original dihedral angles, and see whether anything non-congruent
turns up (it should not; this illustrates the certificate, it proves
nothing). export_mesh writes OFF files for the flat and curved boundaries.
"""
from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import least_squares

from . import kernels
from .angles import dihedral_from_distance, inner_dihedral
from .ballpoly import (
    BallPolyhedron,
    CenterSet,
    build,
    face_interior_point,
    has_interior,
    is_simple,
    is_standard,
    reduce_centers,
)
from .errors import (
    ConsistencyError,
    DegenerateConfigurationError,
    DegenerateSpanError,
    EmptyInteriorError,
    HypothesesNotMetError,
    LatticeMismatchError,
    TruncationError,
)
from .geom import Tolerance
from .rigidity import (
    boundary_framework,
    check_codecomposable,
    check_weakly_convex,
    is_infinitesimally_rigid,
    trivial_motions,
)
from .truncation import (
    UnionPolyhedron,
    build_truncated_delaunay,
    check_boundary_triangles,
    check_no_boundary_vertex,
    check_nerve_isomorphism,
    check_subcomplex,
    extract_polyhedron,
)
from .voronoi import build_delaunay, build_voronoi

NDArrayFloat = NDArray[np.float64]

VERDICT_CERTIFIED = "locally rigid certified"
VERDICT_NOT_BALL_POLY = "not a ball-polyhedron"

# order in which failed hypothesis checks are reported
CHECK_ORDER = (
    "no_boundary_voronoi_vertex",
    "subcomplex",
    "boundary_triangles",
    "nerve_isomorphism",
    "two_sphere",
    "weakly_convex",
    "codecomposable",
)


def round15(x: float) -> float:
    """Collapse to 15 significant digits, the certificate's angle precision."""
    return float(f"{float(x):.15g}")


def centers_to_dict(cs: CenterSet) -> dict:
    return {
        "centers": [[float(v) for v in p] for p in cs.points],
        "labels": list(cs.labels),
        "tolerance": {"eps_geom": cs.tol.eps_geom, "eps_rank": cs.tol.eps_rank},
    }


def centers_from_dict(data: dict) -> CenterSet:
    """Build a center set from the JSON input structure (strict about shape)."""
    if not isinstance(data, dict) or "centers" not in data:
        raise ValueError('input must be an object with a "centers" array')
    pts = data["centers"]
    if not isinstance(pts, list) or not pts:
        raise ValueError('"centers" must be a non-empty array of [x, y, z]')
    for p in pts:
        if not isinstance(p, list) or len(p) != 3:
            raise ValueError(f"center {p!r} is not an [x, y, z] triple")
    labels = data.get("labels")
    tol_spec = data.get("tolerance", {})
    if not isinstance(tol_spec, dict):
        raise ValueError('"tolerance" must be an object')
    tol = Tolerance(
        eps_geom=float(tol_spec.get("eps_geom", 1e-9)),
        eps_rank=float(tol_spec.get("eps_rank", 1e-8)),
    )
    return CenterSet(np.array(pts, dtype=float), labels=labels, tol=tol)


def input_hash(cs: CenterSet) -> str:
    canon = json.dumps(centers_to_dict(cs), sort_keys=True)
    return hashlib.sha256(canon.encode()).hexdigest()


# ---------------------------------------------------------------------------
# certification


@dataclass
class RigidityCertificate:
    input_hash: str
    center_count: int
    reduced_center_count: int
    flags: dict[str, bool]
    verdict: str
    f_vector: tuple[int, int, int] | None = None
    dihedral_angles: list[dict] | None = None
    q_stats: dict | None = None
    hypothesis_checks: dict[str, bool] | None = None
    rigidity: dict | None = None
    failures: list[str] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.verdict == VERDICT_CERTIFIED

    def to_dict(self) -> dict:
        return {
            "input_hash": self.input_hash,
            "center_count": self.center_count,
            "reduced_center_count": self.reduced_center_count,
            "flags": dict(self.flags),
            "f_vector": list(self.f_vector) if self.f_vector is not None else None,
            "dihedral_angles": self.dihedral_angles,
            "q_stats": self.q_stats,
            "hypothesis_checks": self.hypothesis_checks,
            "rigidity": self.rigidity,
            "failures": list(self.failures),
            "verdict": self.verdict,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def _dihedral_entries(poly: BallPolyhedron) -> list[dict]:
    labels = poly.centers.labels
    entries = []
    for e_id, e in enumerate(poly.edges):
        i, j = e.pair
        entries.append(
            {
                "edge": [labels[i], labels[j]],
                "angle": round15(inner_dihedral(poly, e_id)),
            }
        )
    entries.sort(key=lambda d: (d["edge"], d["angle"]))
    return entries


def certify(cs: CenterSet) -> RigidityCertificate:
    """Run the full chain and fold every outcome into one certificate."""
    cert = RigidityCertificate(
        input_hash=input_hash(cs),
        center_count=len(cs),
        reduced_center_count=0,
        flags={
            "has_interior": False,
            "reduced": False,
            "simple": False,
            "standard": False,
        },
        verdict="incomplete",
    )

    try:
        reduced = reduce_centers(cs)
    except EmptyInteriorError as exc:
        cert.failures.append(f"reduce: {exc}")
        cert.verdict = VERDICT_NOT_BALL_POLY
        return cert
    except DegenerateConfigurationError as exc:
        cert.failures.append(f"reduce: {exc}")
        cert.verdict = f"degenerate: {exc}"
        return cert

    cert.reduced_center_count = len(reduced)
    cert.flags["reduced"] = True
    if not has_interior(reduced):
        cert.failures.append("interior: intersection of the balls has no interior")
        cert.verdict = VERDICT_NOT_BALL_POLY
        return cert
    cert.flags["has_interior"] = True

    try:
        poly = build(reduced)
        cert.f_vector = poly.f_vector
        cert.dihedral_angles = _dihedral_entries(poly)
        cert.flags["simple"] = is_simple(poly)
        cert.flags["standard"] = is_standard(poly)
    except (DegenerateConfigurationError, ConsistencyError) as exc:
        cert.failures.append(f"build: {exc}")
        cert.verdict = f"degenerate: {exc}"
        return cert

    for name in ("simple", "standard"):
        if not cert.flags[name]:
            cert.verdict = f"hypotheses not met: {name}=false"
            return cert

    try:
        vor = build_voronoi(reduced)
        dl = build_delaunay(reduced)
        dt = build_truncated_delaunay(reduced, vor, dl, polyhedron=poly)
        if dt.degenerate_sets:
            sets = sorted(sorted(s) for s in dt.degenerate_sets)
            cert.failures.append(f"truncation: unresolved cells {sets}")
            cert.verdict = f"degenerate: truncation undecided for {sets}"
            return cert
        up = extract_polyhedron(dt)
    except TruncationError as exc:
        cert.failures.append(f"truncation: {exc}")
        cert.verdict = f"degenerate: {exc}"
        return cert
    except (DegenerateConfigurationError, ConsistencyError) as exc:
        cert.failures.append(f"tiling: {exc}")
        cert.verdict = f"degenerate: {exc}"
        return cert

    cert.q_stats = {
        "cells_by_dimension": {
            str(d): len(dt.of_dimension(d)) for d in range(4)
        },
        "boundary_f_vector": list(up.boundary_f_vector),
    }

    nerve_report = check_nerve_isomorphism(up, poly)
    checks = {
        "no_boundary_voronoi_vertex": check_no_boundary_vertex(vor, poly).ok,
        "subcomplex": check_subcomplex(dt).ok,
        "boundary_triangles": check_boundary_triangles(up, poly).ok,
        "nerve_isomorphism": nerve_report.is_isomorphic,
        "two_sphere": nerve_report.sphere_ok,
        "weakly_convex": check_weakly_convex(up).ok,
        "codecomposable": check_codecomposable(up, dl).ok,
    }
    cert.hypothesis_checks = checks
    for name in CHECK_ORDER:
        if not checks[name]:
            cert.verdict = f"hypotheses not met: {name}=false"
            return cert

    try:
        fw, _index_map = boundary_framework(up)
        report = is_infinitesimally_rigid(fw, eps_rank=cs.tol.eps_rank)
    except DegenerateSpanError as exc:
        cert.failures.append(f"rigidity: {exc}")
        cert.verdict = f"degenerate: {exc}"
        return cert

    cert.rigidity = {
        "nullity": report.nullity,
        "rigid": report.rigid,
        "ill_conditioned": report.ill_conditioned,
    }
    if report.ill_conditioned:
        cert.verdict = "ill-conditioned: rigidity rank decision is borderline"
    elif report.rigid:
        cert.verdict = VERDICT_CERTIFIED
    else:
        cert.failures.append(
            f"rigidity: kernel has dimension {report.nullity}, expected 6"
        )
        cert.verdict = f"not certified: nullity={report.nullity}"
    return cert


# ---------------------------------------------------------------------------
# congruence comparison


def _lattice_profile(poly: BallPolyhedron) -> list[tuple]:
    """Per-center invariants preserved by any face-lattice isomorphism."""
    n = len(poly.centers)
    edge_deg = [0] * n
    vertex_sizes: list[list[int]] = [[] for _ in range(n)]
    for e in poly.edges:
        for i in e.pair:
            edge_deg[i] += 1
    for v in poly.vertices:
        for i in v.labels:
            vertex_sizes[i].append(len(v.labels))
    return [(edge_deg[i], tuple(sorted(vertex_sizes[i]))) for i in range(n)]


def iter_lattice_isomorphisms(p1: BallPolyhedron, p2: BallPolyhedron):
    """All center-index bijections carrying edges to edges, vertices to vertices.

    Backtracking over label maps, pruned by the per-center profiles; the
    search space is tiny for the sizes this package handles. Symmetric
    bodies admit several isomorphisms, and which of them is geometrically
    realizable is for the caller to decide.
    """
    n = len(p1.centers)
    if len(p2.centers) != n or p1.f_vector != p2.f_vector:
        return
    prof1, prof2 = _lattice_profile(p1), _lattice_profile(p2)
    if sorted(prof1) != sorted(prof2):
        return
    edges1 = {frozenset(e.pair) for e in p1.edges}
    edges2 = {frozenset(e.pair) for e in p2.edges}
    verts1 = {frozenset(v.labels) for v in p1.vertices}
    verts2 = {frozenset(v.labels) for v in p2.vertices}

    order = sorted(range(n), key=lambda i: prof1.count(prof1[i]))
    assign: dict[int, int] = {}
    used: set[int] = set()

    def consistent(i: int, j: int) -> bool:
        for a, b in assign.items():
            if (frozenset((i, a)) in edges1) != (frozenset((j, b)) in edges2):
                return False
        return True

    def backtrack(k: int):
        if k == n:
            sigma = [assign[i] for i in range(n)]
            ok_e = {frozenset(sigma[x] for x in e) for e in edges1} == edges2
            ok_v = {frozenset(sigma[x] for x in v) for v in verts1} == verts2
            if ok_e and ok_v:
                yield sigma
            return
        i = order[k]
        for j in range(n):
            if j in used or prof1[i] != prof2[j]:
                continue
            if not consistent(i, j):
                continue
            assign[i] = j
            used.add(j)
            yield from backtrack(k + 1)
            del assign[i]
            used.discard(j)

    yield from backtrack(0)


def find_lattice_isomorphism(
    p1: BallPolyhedron, p2: BallPolyhedron
) -> list[int] | None:
    return next(iter_lattice_isomorphisms(p1, p2), None)


def best_isometry(
    source: NDArrayFloat, target: NDArrayFloat
) -> tuple[NDArrayFloat, NDArrayFloat, bool, float]:
    """Least-squares orthogonal map R x + t ~ y over paired rows.

    Tries the proper rotation and the reflection branch, keeps the better.
    Returns (R, t, used_reflection, rms).
    """
    X = np.asarray(source, dtype=float)
    Y = np.asarray(target, dtype=float)
    cx, cy = X.mean(axis=0), Y.mean(axis=0)
    H = (X - cx).T @ (Y - cy)
    U, _s, Vt = np.linalg.svd(H)

    def finish(R: NDArrayFloat) -> tuple[NDArrayFloat, float]:
        t = cy - R @ cx
        diff = (X @ R.T + t) - Y
        return t, float(np.sqrt(np.mean(np.sum(diff * diff, axis=1))))

    R_free = Vt.T @ U.T
    d = float(np.sign(np.linalg.det(R_free)))
    R_proper = Vt.T @ np.diag([1.0, 1.0, d]) @ U.T

    t_p, rms_p = finish(R_proper)
    t_f, rms_f = finish(R_free)
    if rms_f < rms_p - 1e-15:
        return R_free, t_f, bool(np.linalg.det(R_free) < 0), rms_f
    return R_proper, t_p, bool(np.linalg.det(R_proper) < 0), rms_p


def _sample_face(poly: BallPolyhedron, face_id: int, count: int = 400) -> NDArrayFloat:
    """Deterministic point sample of one spherical face, boundary included."""
    f = poly.faces[face_id]
    c = poly.centers.points[f.center_index]
    pts: list[NDArrayFloat] = [face_interior_point(poly.centers, f.center_index)]
    for v_id in sorted(poly.face_vertices[face_id]):
        pts.append(poly.vertices[v_id].position)
    for e_id in sorted(poly.face_edges[face_id]):
        arc = poly.edges[e_id].arc
        for s in np.linspace(0.0, 1.0, 33):
            pts.append(arc.point_at(float(s)))
    # golden-spiral directions, filtered to the face
    k = np.arange(count, dtype=float)
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    z = 1.0 - 2.0 * (k + 0.5) / count
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    theta = 2.0 * np.pi * k / phi
    dirs = np.stack([r * np.cos(theta), r * np.sin(theta), z], axis=1)
    cand = c + dirs
    dmax = np.array(
        [kernels.max_dist_to_centers(np.ascontiguousarray(x), poly.centers.points) for x in cand]
    )
    pts.extend(cand[dmax <= 1.0 + 1e-9])
    return np.array(pts)


def _directed_face_distance(
    samples: NDArrayFloat,
    poly: BallPolyhedron,
    face_id: int,
    face_samples: NDArrayFloat,
) -> float:
    """Largest distance from the sample points to one face of the body.

    A sample whose radial projection onto the face's sphere lands inside the
    body is exactly |distance to sphere| away from the face. Samples whose
    projection falls off the face are handled by the dense boundary sample
    instead, which over-estimates by at most the arc sampling step.
    """
    c = poly.centers.points[poly.faces[face_id].center_index]
    rel = samples - c
    norms = np.linalg.norm(rel, axis=1)
    radial = np.abs(norms - 1.0)
    proj = c + rel / norms[:, None]
    on_body = np.array(
        [
            kernels.max_dist_to_centers(np.ascontiguousarray(x), poly.centers.points)
            <= 1.0 + 1e-9
            for x in proj
        ]
    )
    # per-sample nearest boundary sample point
    diff = samples[:, None, :] - face_samples[None, :, :]
    to_boundary = np.sqrt(np.sum(diff * diff, axis=2)).min(axis=1)
    per_sample = np.where(on_body, np.minimum(radial, to_boundary), to_boundary)
    return float(per_sample.max())


@dataclass
class CongruenceReport:
    isomorphism: list[int]
    label_map: dict[str, str]
    dihedral_max_deviation: float
    face_hausdorff_max: float
    rotation: NDArrayFloat
    translation: NDArrayFloat
    reflection: bool
    rms: float
    congruent: bool

    def to_dict(self) -> dict:
        return {
            "isomorphism": list(self.isomorphism),
            "label_map": dict(self.label_map),
            "dihedral_max_deviation": self.dihedral_max_deviation,
            "face_hausdorff_max": self.face_hausdorff_max,
            "rotation": [[float(v) for v in row] for row in self.rotation],
            "translation": [float(v) for v in self.translation],
            "reflection": self.reflection,
            "rms": self.rms,
            "congruent": self.congruent,
        }


def compare(cs1: CenterSet, cs2: CenterSet) -> CongruenceReport:
    """Match the face lattices, then measure how far from congruent."""
    polys = []
    for cs in (cs1, cs2):
        reduced = reduce_centers(cs)
        poly = build(reduced)
        if not (is_simple(poly) and is_standard(poly)):
            raise HypothesesNotMetError(
                "compare requires inputs whose bodies are simple and standard"
            )
        polys.append(poly)
    p1, p2 = polys

    # among all lattice isomorphisms, keep the one closest to a congruence:
    # symmetric bodies admit combinatorial automorphisms that geometry
    # does not realize
    sigma = None
    best = None
    for cand in iter_lattice_isomorphisms(p1, p2):
        R_c, t_c, refl_c, rms_c = best_isometry(
            p1.centers.points, p2.centers.points[cand]
        )
        if best is None or rms_c < best[3]:
            sigma, best = cand, (R_c, t_c, refl_c, rms_c)
            if rms_c <= cs1.tol.eps_geom:
                break
    if sigma is None:
        raise LatticeMismatchError("no lattice isomorphism")

    ang2 = {frozenset(e.pair): inner_dihedral(p2, k) for k, e in enumerate(p2.edges)}
    dev = 0.0
    for e_id, e in enumerate(p1.edges):
        image = frozenset(sigma[i] for i in e.pair)
        dev = max(dev, abs(inner_dihedral(p1, e_id) - ang2[image]))

    R, t, reflection, rms = best

    face_of_center2 = {f.center_index: k for k, f in enumerate(p2.faces)}
    haus = 0.0
    R_inv, t_inv = R.T, -(R.T @ t)
    for f_id, f in enumerate(p1.faces):
        g_id = face_of_center2[sigma[f.center_index]]
        a = _sample_face(p1, f_id) @ R.T + t
        b = _sample_face(p2, g_id)
        haus = max(
            haus,
            _directed_face_distance(a, p2, g_id, b),
            _directed_face_distance(b @ R_inv.T + t_inv, p1, f_id, _sample_face(p1, f_id)),
        )

    labels1, labels2 = cs1.labels, cs2.labels
    return CongruenceReport(
        isomorphism=list(sigma),
        label_map={labels1[i]: labels2[sigma[i]] for i in range(len(sigma))},
        dihedral_max_deviation=float(dev),
        face_hausdorff_max=haus,
        rotation=R,
        translation=t,
        reflection=reflection,
        rms=rms,
        congruent=bool(rms <= cs1.tol.eps_geom),
    )


# ---------------------------------------------------------------------------
# perturbation probe


@dataclass
class ProbeTrial:
    residual: float
    rms_after_alignment: float
    congruent: bool


@dataclass
class ProbeReport:
    seed: int
    magnitude: float
    trials: list[ProbeTrial]
    all_congruent: bool

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "magnitude": self.magnitude,
            "trials": [
                {
                    "residual": t.residual,
                    "rms_after_alignment": t.rms_after_alignment,
                    "congruent": t.congruent,
                }
                for t in self.trials
            ],
            "all_congruent": self.all_congruent,
        }


def perturbation_probe(
    cs: CenterSet, trials: int = 100, magnitude: float = 1e-3, seed: int = 0
) -> ProbeReport:
    """Kick a certified configuration and re-solve for its dihedral angles.

    Each trial perturbs the centers orthogonally to the rigid motions, then
    minimizes the squared differences of the edge dihedral angles to the
    originals over all center positions. A certified input should only ever
    come back as a congruent copy; this never proves rigidity, it fails to
    refute it.
    """
    cert = certify(cs)
    if not cert.certified:
        raise HypothesesNotMetError(
            f"perturbation probe requires a certified input, got: {cert.verdict}"
        )
    reduced = reduce_centers(cs)
    poly = build(reduced)
    pts0 = reduced.points
    n = len(reduced)
    pairs = sorted({e.pair for e in poly.edges})
    target = np.array(
        [
            dihedral_from_distance(float(np.linalg.norm(pts0[i] - pts0[j])))
            for i, j in pairs
        ]
    )

    def residuals(x: NDArrayFloat) -> NDArrayFloat:
        p = x.reshape(n, 3)
        out = np.empty(len(pairs))
        for k, (i, j) in enumerate(pairs):
            d = float(np.linalg.norm(p[i] - p[j]))
            # clamp into the angle law's domain so stray trust-region trial
            # steps stay evaluable; clamped steps cost more and get rejected
            d = min(max(d, 1e-6), 2.0 - 1e-9)
            out[k] = dihedral_from_distance(d) - target[k]
        return out

    trivial = trivial_motions(pts0)
    rng = np.random.default_rng(seed)
    results: list[ProbeTrial] = []
    for _ in range(max(0, trials)):
        if magnitude == 0.0:
            results.append(ProbeTrial(residual=0.0, rms_after_alignment=0.0, congruent=True))
            continue
        kick = rng.normal(size=3 * n)
        kick -= trivial.T @ (trivial @ kick)
        norm = float(np.linalg.norm(kick))
        if norm > 0.0:
            kick *= magnitude / norm
        sol = least_squares(
            residuals,
            pts0.ravel() + kick,
            method="trf",
            xtol=1e-15,
            ftol=1e-15,
            gtol=1e-15,
        )
        final = sol.x.reshape(n, 3)
        _R, _t, _refl, rms = best_isometry(final, pts0)
        res_norm = float(np.linalg.norm(sol.fun))
        results.append(
            ProbeTrial(
                residual=res_norm,
                rms_after_alignment=rms,
                congruent=bool(rms <= 1e-6 and res_norm <= 1e-9),
            )
        )
    return ProbeReport(
        seed=seed,
        magnitude=magnitude,
        trials=results,
        all_congruent=all(t.congruent for t in results),
    )


# ---------------------------------------------------------------------------
# mesh export


def _orient_closed_surface(
    triangles: list[tuple[int, int, int]], positions: NDArrayFloat
) -> list[tuple[int, int, int]]:
    """Consistently orient a closed triangle mesh, outward by signed volume."""
    if not triangles:
        return []
    by_edge: dict[tuple[int, int], list[int]] = {}
    for k, t in enumerate(triangles):
        for e in itertools.combinations(sorted(t), 2):
            by_edge.setdefault(tuple(e), []).append(k)
    oriented: dict[int, tuple[int, int, int]] = {0: triangles[0]}
    stack = [0]
    while stack:
        cur = stack.pop()
        a, b, c = oriented[cur]
        directed = {(a, b), (b, c), (c, a)}
        for e in itertools.combinations(sorted(oriented[cur]), 2):
            owners = by_edge.get(tuple(e), [])
            if len(owners) != 2:
                raise ConsistencyError(f"edge {e} lies in {len(owners)} triangles")
            other = owners[0] if owners[1] == cur else owners[1]
            if other in oriented:
                continue
            u, v = e
            want = (v, u) if (u, v) in directed else (u, v)
            w = (set(triangles[other]) - {u, v}).pop()
            oriented[other] = (want[0], want[1], w)
            stack.append(other)
    if len(oriented) != len(triangles):
        raise ConsistencyError("boundary surface is disconnected")
    out = [oriented[k] for k in range(len(triangles))]
    volume = 0.0
    for a, b, c in out:
        volume += float(np.linalg.det(np.array([positions[a], positions[b], positions[c]])))
    if volume < 0.0:
        out = [(a, c, b) for a, b, c in out]
    return out


def _off_text(
    vertices: NDArrayFloat,
    faces: list[tuple[int, int, int]],
    comments: list[str] | None = None,
) -> str:
    directed: set[tuple[int, int]] = set()
    for a, b, c in faces:
        for e in ((a, b), (b, c), (c, a)):
            if e in directed:
                raise ConsistencyError(f"directed edge {e} repeated; mesh not watertight")
            directed.add(e)
    lines = ["OFF"]
    for c in comments or []:
        lines.append(f"# {c}")
    lines.append(f"{len(vertices)} {len(faces)} {len(directed) // 2}")
    for p in vertices:
        lines.append(f"{p[0]:.17g} {p[1]:.17g} {p[2]:.17g}")
    for a, b, c in faces:
        lines.append(f"3 {a} {b} {c}")
    return "\n".join(lines) + "\n"


def _q_boundary_mesh(up: UnionPolyhedron) -> tuple[NDArrayFloat, list[tuple[int, int, int]]]:
    indices = up.boundary_vertex_indices
    local = {g: k for k, g in enumerate(indices)}
    tris = []
    for f in sorted(up.boundary_faces, key=sorted):
        if len(f) != 3:
            raise TruncationError("boundary face is not a triangle")
        a, b, c = sorted(f)
        tris.append((local[a], local[b], local[c]))
    positions = up.centers.points[indices]
    return positions, _orient_closed_surface(tris, positions)


def _p_boundary_mesh(
    poly: BallPolyhedron, depth: int
) -> tuple[NDArrayFloat, list[tuple[int, int, int]]]:
    """Sampled triangulation of the curved boundary, watertight by sharing.

    Every edge arc is subdivided once, globally, into 2**depth segments;
    each face is fanned from its spherical centroid around its boundary
    cycle. Neighboring faces traverse the shared arc in opposite directions,
    so directed edges pair up exactly.
    """
    segments = 2 ** depth
    registry: dict[tuple[int, int, int], int] = {}
    positions: list[NDArrayFloat] = []

    def vid(p: NDArrayFloat) -> int:
        key = tuple(int(round(v * 1e12)) for v in p)
        if key not in registry:
            registry[key] = len(positions)
            positions.append(np.asarray(p, dtype=float))
        return registry[key]

    chains: list[list[int]] = []
    for e in poly.edges:
        chains.append(
            [vid(e.arc.point_at(k / segments)) for k in range(segments + 1)]
        )

    triangles: list[tuple[int, int, int]] = []
    for f_id, f in enumerate(poly.faces):
        c = poly.centers.points[f.center_index]
        if len(f.cycles) != 1:
            raise DegenerateConfigurationError(
                "face with multiple boundary cycles cannot be fan-sampled"
            )
        (cycle,) = f.cycles
        ring: list[int] = []
        for e_id, forward in cycle:
            ids = chains[e_id] if forward else chains[e_id][::-1]
            ring.extend(ids[:-1])
        mean_dir = np.mean([positions[k] - c for k in ring], axis=0)
        norm = float(np.linalg.norm(mean_dir))
        if norm < 1e-12:
            raise DegenerateConfigurationError("face centroid direction degenerates")
        apex = vid(c + mean_dir / norm)
        for k in range(len(ring)):
            a, b = ring[k], ring[(k + 1) % len(ring)]
            triangles.append((apex, a, b))
    return np.array(positions), triangles


def export_mesh(cs: CenterSet, what: str = "q", depth: int = 3) -> str:
    """OFF text for the union polyhedron boundary or the sampled curved one."""
    reduced = reduce_centers(cs)
    poly = build(reduced)
    if what in ("q", "boundary"):
        vor = build_voronoi(reduced)
        dl = build_delaunay(reduced)
        dt = build_truncated_delaunay(reduced, vor, dl, polyhedron=poly)
        up = extract_polyhedron(dt)
        vertices, faces = _q_boundary_mesh(up)
        return _off_text(vertices, faces)
    if what == "p-mesh":
        vertices, faces = _p_boundary_mesh(poly, depth)
        return _off_text(
            vertices,
            faces,
            comments=[
                "approximate: sampled triangulation of the curved boundary, "
                f"arc subdivision depth {depth}",
            ],
        )
    raise ValueError(f"unknown export target {what!r}; use q, boundary, or p-mesh")
