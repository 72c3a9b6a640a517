"""Exception types shared across the package."""


class SmapError(Exception):
    """Base class for all package errors."""


class ParameterError(SmapError, ValueError):
    """Invalid argument or configuration value."""


class TailError(SmapError, RuntimeError):
    """A tail extrapolation was required but the field does not decay."""


class GridRangeError(SmapError, ValueError):
    """Requested frequency or radius is not resolvable on the given grid."""


class SmallnessError(SmapError, RuntimeError):
    """Input outside the small-data regime the gauge constructions need."""


class IntegrationError(SmapError, RuntimeError):
    """An ODE transport lost accuracy (orthogonality or sphere constraint)."""


class BoundaryError(SmapError, RuntimeError):
    """Far-field data incompatible with the boundary conditions at infinity."""


class ReconstructionError(SmapError, RuntimeError):
    """Map reconstruction produced inconsistent gauge fields."""


class ConsistencyError(SmapError, RuntimeError):
    """Gauge fields violate an algebraic compatibility relation."""
