"""Exception hierarchy shared by the diraclab modules."""


class DiracLabError(Exception):
    """Base class for all library errors."""


class DimensionError(DiracLabError, ValueError):
    """Operands live in incompatible dimensions or grids."""


class SingularSymbolError(DiracLabError, ZeroDivisionError):
    """The Dirac symbol is not invertible (xi = 0)."""


class NotBandLimitedError(DiracLabError, ValueError):
    """Requested field cannot be represented on the periodic grid."""


class NonIntegrableWeightError(DiracLabError, OverflowError):
    """A weight overflows double precision on the integration support."""


class ParameterOutOfRangeError(DiracLabError, OverflowError):
    """Weight parameters push exp() beyond double range."""


class DegenerateSolutionError(DiracLabError, ValueError):
    """Manufactured solution vanishes (or nearly so) somewhere on the grid."""


class SupportError(DiracLabError, ValueError):
    """A field is not supported where its contract says it must be."""


class PreconditionError(DiracLabError, ValueError):
    """Structural hypothesis on the input is violated (symmetry, reality, ...)."""


class GeometryError(DiracLabError, ValueError):
    """Balls, rings or ladders do not fit inside the computational box."""


class StepSizeError(DiracLabError, ValueError):
    """Explicit integrator step is too large for the system's coefficients."""
