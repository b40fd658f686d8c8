"""Exception types raised by the toolkit."""


class PeriodicaError(Exception):
    """Base class for all toolkit-specific errors."""


# -- construction / validation ------------------------------------------------

class ZeroLengthEdge(PeriodicaError):
    """An edge joins coincident points (or is a loop)."""


class DuplicateEdge(PeriodicaError):
    """The same unordered vertex pair appears twice in the edge list."""


class Disconnected(PeriodicaError):
    """The linkage graph is not connected."""


class MarkedPairsNotBasis(PeriodicaError):
    """The marked-pair difference vectors do not span the ambient space."""


class WrongPairCount(PeriodicaError):
    """A linkage in dimension d needs exactly d marked pairs."""


class DuplicateOrbit(PeriodicaError):
    """Two edge orbits coincide up to orientation reversal and shift negation."""


class SingularMatrix(PeriodicaError):
    """A matrix required to be invertible is (numerically) singular."""


# -- rigidity analysis --------------------------------------------------------

class DegeneratePlacement(PeriodicaError):
    """The placement does not affinely span the ambient space."""


class RankToleranceAmbiguous(PeriodicaError):
    """A singular value lies too close to the rank cutoff to call."""


# -- finite-to-periodic -------------------------------------------------------

class InconsistentIdentification(PeriodicaError):
    """Marked-pair identifications assign conflicting translations to a vertex."""


# -- auxetics -----------------------------------------------------------------

class DimensionMismatch(PeriodicaError):
    """A deformation does not match the structure it is applied to."""


class BudgetExhausted(PeriodicaError):
    """The direction search ran out of budget; carries the best point found."""

    def __init__(self, message, coefficients, lambda_min):
        super().__init__(message)
        self.coefficients = coefficients
        self.lambda_min = lambda_min


# -- builders -----------------------------------------------------------------

class NonRigidScaffold(PeriodicaError):
    """Hinge attachment requires a minimally rigid scaffold."""


class DegenerateHinge(PeriodicaError):
    """Hinge points violate the hinge-plane or independence conditions."""


class RedundantAttachment(PeriodicaError):
    """Attaching new bars destroyed constraint independence."""


class DegenerateSimplex(PeriodicaError):
    """Simplex vertices are not affinely independent."""


class IllConditionedPosition(PeriodicaError):
    """The chosen joint position makes the velocity system ill conditioned."""


# -- path tracing -------------------------------------------------------------

class NotOneDof(PeriodicaError):
    """Path tracing requires a one-degree-of-freedom framework."""


class NotAuxeticAtStart(PeriodicaError):
    """Interval detection requires an auxetic tangent at the start sample."""


# -- documents / export -------------------------------------------------------

class SchemaError(PeriodicaError):
    """A document violates the expected schema; carries a JSON path."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


class VersionUnsupported(PeriodicaError):
    """The document declares a version this toolkit cannot read."""


class UnsupportedDimension(PeriodicaError):
    """The operation only supports dimensions 2 and 3."""
