"""Exception and warning types raised across the package."""


class KGError(Exception):
    """Base class for all package errors."""


class DomainError(KGError, ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class PreconditionError(KGError, ValueError):
    """Couplings or grids violate a documented precondition (e.g. S0**2 <= V0**2)."""


class DegenerateInputError(KGError, ValueError):
    pass


class NoBoundStateError(KGError):
    """The requested level lies above the continuum edge of the discretised operator."""


class BracketError(KGError):
    """The self-consistency function does not change sign over the search bracket."""

    def __init__(self, message, g_lo=None, g_hi=None):
        super().__init__(message)
        self.g_lo = g_lo
        self.g_hi = g_hi


class CoarseGridWarning(UserWarning):
    """Finite-difference residual is likely dominated by truncation error."""


class UnderflowWarning(UserWarning):
    pass
