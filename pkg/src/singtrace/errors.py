"""Exception types raised across the package."""


class SingtraceError(Exception):
    """Base class for all package errors."""


class InputError(SingtraceError, ValueError):
    """Rejected input data (negative values, non-monotone sequences, ...)."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class BoundViolation(SingtraceError, ValueError):
    """An evaluated value exceeded the caller-declared sup-norm bound."""


class DomainError(SingtraceError, ValueError):
    pass


class QuadratureError(SingtraceError, ArithmeticError):
    """Quadrature failed to reach tolerance on the reported interval."""

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class NotInSpaceError(SingtraceError, ArithmeticError):
    """The weighted mean grows without bound: x is not in M(psi)."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class HorizonOverflow(SingtraceError, OverflowError):
    """A requested horizon is beyond what the data can be evaluated at.

    ``limit`` carries the largest admissible value when known.
    """

    def __init__(self, message, limit=None):
        super().__init__(message)
        self.limit = limit


class TailBoundError(SingtraceError, ArithmeticError):
    """A truncation tail could not be certified."""
