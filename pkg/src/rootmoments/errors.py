"""Exception hierarchy shared by all modules."""


class RootMomentsError(Exception):
    """Base class for every error raised by this package."""


class PrimalityError(RootMomentsError, ValueError):
    """Modulus is not an odd prime."""


class DomainError(RootMomentsError, ValueError):
    """Argument outside the mathematical domain (q | n, y <= 0, principal character...)."""


class PreconditionError(RootMomentsError, ValueError):
    """A documented precondition on parameters does not hold."""


class ResourceError(RootMomentsError, MemoryError):
    """Requested table or enumeration exceeds a configured cap."""


class ConvergenceError(RootMomentsError, ArithmeticError):
    """A truncated expansion did not converge at the requested size."""


class ConsistencyError(RootMomentsError, AssertionError):
    """Two independent evaluation paths disagree beyond tolerance."""
