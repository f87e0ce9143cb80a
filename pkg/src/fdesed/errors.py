"""Exception and warning classes used across the package."""


class FdeError(Exception):
    """Base class for all package errors."""


class DataError(FdeError):
    """Problem with an input dataset or file (CLI exit code 3)."""


class NumericalError(FdeError):
    """A computation could not be carried out (CLI exit code 4)."""


class NonProbabilityVector(ValueError, FdeError):
    pass


class QuadratureNonConvergence(NumericalError):
    pass


class DegenerateMultiplier(NumericalError):
    """Raised when |lambda1| is too small for a formula that divides by it."""


class NegativeDiscriminant(NumericalError):
    pass


class NegativeBase(NumericalError):
    """Tsallis profile would raise a negative number to the 2/3 power."""

    def __init__(self, message, y=None):
        super().__init__(message)
        self.y = y


class OutOfDomainHeight(ValueError, FdeError):
    pass


class OutOfRange(ValueError, FdeError):
    pass


class InsufficientData(DataError):
    pass


class UnsortedData(DataError):
    pass


class SpanZero(DataError):
    pass


class ParseError(DataError):
    pass


class MissingDepth(DataError):
    pass


class NonMonotoneHeights(DataError):
    pass


class SchemaVersionMismatch(DataError):
    pass


class GeometryMismatch(DataError):
    pass


class ZeroObserved(ValueError, FdeError):
    pass


class ZeroComputed(ValueError, FdeError):
    pass


class DegenerateVariance(ValueError, FdeError):
    pass


class FdeWarning(UserWarning):
    pass


class TruncationDivergence(FdeWarning):
    """|lambda0 + lambda1*c| >= 1 somewhere on the interval."""


class FlatObjective(FdeWarning):
    pass


class BoundaryOptimum(FdeWarning):
    """The fitted parameter sits on an edge of its search interval."""
