"""Exception hierarchy shared by every module."""


class DiscriminationError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(DiscriminationError, ValueError):
    """A parameter lies outside the domain of the formula being evaluated."""


class NotHermitian(DiscriminationError, ValueError):
    pass


class NegativeEigenvalue(DiscriminationError, ValueError):
    pass


class NotPSD(DomainError):
    pass


class DimensionCapExceeded(DiscriminationError):
    pass


class DepthCapExceeded(DiscriminationError):
    pass


class ZeroProbabilityBranch(DiscriminationError, ZeroDivisionError):
    pass


class InvalidPOVM(DiscriminationError, ValueError):
    pass


class AngleCountMismatch(DiscriminationError, ValueError):
    pass


class NumericalFailure(DiscriminationError, ArithmeticError):
    """A computed quantity violated a bound it must satisfy."""
