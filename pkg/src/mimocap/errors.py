"""Exception and warning types raised across the package."""


class MimocapError(Exception):
    """Base class for all package errors."""


class InvalidParameter(MimocapError, ValueError):
    """An argument is outside the domain an operation accepts."""


class UnsupportedMoment(InvalidParameter):
    """Requested moment order is not implemented."""


class NumericFailure(MimocapError, ArithmeticError):
    """A computation became too ill-conditioned to trust."""


class ApproximationBreakdown(NumericFailure):
    """The Gamma/variance approximation produced a nonpositive variance."""


class UnsupportedCombination(MimocapError, ValueError):
    """Option combination has no implementation (e.g. analytic ZF capacity)."""


class BoundaryOptimumWarning(UserWarning):
    """The capacity maximizer sits on an edge of the search interval."""


class MultipleMaximaWarning(UserWarning):
    """The coarse capacity grid shows more than one local maximum."""
