"""Ball-polyhedra built from unit-ball intersections, and their rigidity certificates."""

from .geom import Tolerance, DEFAULT_TOLERANCE
from .ballpoly import (
    CenterSet,
    BallPolyhedron,
    has_interior,
    reduce_centers,
    build,
    is_simple,
    is_standard,
    dual,
)
from .angles import dihedral_from_distance, distance_from_dihedral, inner_dihedral, face_angle
from .voronoi import (
    VoronoiComplex,
    DelaunayComplex,
    build_voronoi,
    build_delaunay,
    check_feature_correspondence,
)
from .truncation import (
    TruncatedComplex,
    UnionPolyhedron,
    build_truncated_delaunay,
    check_no_boundary_vertex,
    check_subcomplex,
    extract_polyhedron,
    check_boundary_triangles,
    nerve_of_faces,
    check_nerve_isomorphism,
)
from .rigidity import (
    Framework,
    rigidity_matrix,
    is_infinitesimally_rigid,
    trivial_motions,
    flex_length_derivative,
    check_weakly_convex,
    check_codecomposable,
    boundary_framework,
)
from .pipeline import (
    RigidityCertificate,
    CongruenceReport,
    certify,
    compare,
    perturbation_probe,
    export_mesh,
)

__version__ = "0.1.0"

__all__ = [
    "Tolerance",
    "DEFAULT_TOLERANCE",
    "CenterSet",
    "BallPolyhedron",
    "has_interior",
    "reduce_centers",
    "build",
    "is_simple",
    "is_standard",
    "dual",
    "dihedral_from_distance",
    "distance_from_dihedral",
    "inner_dihedral",
    "face_angle",
    "VoronoiComplex",
    "DelaunayComplex",
    "build_voronoi",
    "build_delaunay",
    "check_feature_correspondence",
    "TruncatedComplex",
    "UnionPolyhedron",
    "build_truncated_delaunay",
    "check_no_boundary_vertex",
    "check_subcomplex",
    "extract_polyhedron",
    "check_boundary_triangles",
    "nerve_of_faces",
    "check_nerve_isomorphism",
    "Framework",
    "rigidity_matrix",
    "is_infinitesimally_rigid",
    "trivial_motions",
    "flex_length_derivative",
    "check_weakly_convex",
    "check_codecomposable",
    "boundary_framework",
    "RigidityCertificate",
    "CongruenceReport",
    "certify",
    "compare",
    "perturbation_probe",
    "export_mesh",
    "__version__",
]
