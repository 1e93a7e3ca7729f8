"""Exception types raised across the package."""


class CTBandsError(Exception):
    """Base class for all package errors."""


class NotHermitian(CTBandsError, ValueError):
    pass


class NoConvergence(CTBandsError, RuntimeError):
    pass


class DimensionMismatch(CTBandsError, ValueError):
    pass


class ZeroEpsilon(CTBandsError, ValueError):
    pass


class OddSize(CTBandsError, ValueError):
    pass


class BrokenBipartiteness(CTBandsError, ValueError):
    pass


class OutsideRegime(CTBandsError, ValueError):
    """Requested quantity is only defined for T > 4J and 0 <= gamma <= gamma_c."""


class BrokenPhase(CTBandsError, ValueError):
    """Density of states requested where the spectrum is not real."""


class InsufficientBins(CTBandsError, ValueError):
    pass
