"""Exception types shared across the package."""


class RadspecError(Exception):
    """Base class for all package errors."""


class ConstructionError(RadspecError):
    """Invalid family, size, or normalization when building a space."""


class ValidationError(RadspecError):
    """Structured data violating a documented invariant (root lists, gram, profiles)."""


class DomainError(RadspecError):
    """Input outside the mathematical domain of an operation (chamber, radius)."""


class CapabilityError(RadspecError):
    """Operation not supported for this space / mode combination."""


class ToleranceError(RadspecError):
    """Quadrature failed to converge and the behavior is not a clean divergence."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ResolutionError(RadspecError):
    """Grid-backed function too coarse for the requested derivative evaluation."""


class PreconditionError(RadspecError):
    """Numeric precondition of an operation violated (exponent ranges etc.)."""


class RegionError(PreconditionError):
    """(s, p) pair outside the admissibility region."""


class DivergenceError(RadspecError):
    """A quantity that must be finite was detected as divergent."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
