"""Exception types shared across the library."""


class PsrError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(PsrError, ValueError):
    """Operands have incompatible dimensions."""


class NotHyperbolic(PsrError):
    """The point is not a hyperbolic point of the cubic."""


class LevelMismatch(PsrError):
    """The point does not lie on the level set {h = 1}."""


class NumericalFailure(PsrError):
    """A numerical factorization lost positivity (pivot below threshold)."""


class OutsideDomain(PsrError):
    """The point is not in the hyperplane section of the cone."""


class AlphaNonpositive(PsrError):
    """The x-derivative is nonpositive at the target point, so the explicit
    base-point change of coordinates is not available there."""


class NoPositiveRoot(PsrError):
    """The ray polynomial 1 - t^2 + c t^3 has no positive root; the section
    is unbounded in this direction."""


class NotCCPSR(PsrError):
    """The instance is not a closed connected hypersurface, but the requested
    operation assumes it is."""


class ConvergenceFailure(PsrError):
    """The sphere optimizer produced no certified critical point.

    The best effort result is attached as ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class EndpointNotClosed(PsrError):
    """A deformation endpoint does not define a closed hypersurface."""


class DegeneratePlane(PsrError):
    """The two vectors do not span a 2-plane."""


class MalformedInput(PsrError, ValueError):
    """A JSON document does not follow the documented schema."""
