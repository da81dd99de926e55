"""Exception types shared across the package."""


class BallRigidError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateConfigurationError(BallRigidError):
    """Input sits on (or too close to) a decision boundary of the geometry.

    Raised instead of silently picking the generic branch: tangent spheres,
    collinear triples, co-spherical point sets in strict mode, witness points
    within tolerance of the boundary, and similar near-ties all land here.
    """


class EmptyInteriorError(BallRigidError):
    """The intersection of the balls has empty interior ("not a ball-polyhedron")."""


class NotReducedError(BallRigidError):
    """An operation that requires a reduced center family received one that is not."""


class DualityError(BallRigidError):
    """The dual construction failed one of its structural cross-checks."""


class TruncationError(BallRigidError):
    """The truncated complex lacks the structure needed downstream (e.g. no 3-cell)."""


class CodecompositionError(BallRigidError):
    """Complement cell data is corrupt (not in convex position)."""


class DegenerateSpanError(BallRigidError):
    """Framework vertices do not affinely span 3-space."""


class LatticeMismatchError(BallRigidError):
    """No lattice isomorphism exists between the two combinatorial structures."""


class HypothesesNotMetError(BallRigidError):
    """An operation requiring a certified input received one that is not."""


class ConsistencyError(BallRigidError):
    """Two independent computations of the same quantity disagree beyond tolerance."""
