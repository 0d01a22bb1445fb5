"""Exception types raised across the package."""


class SerelayError(Exception):
    """Base class for all package errors."""


class DecompositionFailure(SerelayError):
    """An SVD or eigendecomposition did not converge."""


class NotPositiveDefinite(SerelayError):
    """A matrix required to be positive definite is not."""


class ZfInfeasible(SerelayError):
    """No zero-forcing null space exists (M < 2 or zero estimate)."""


class InvalidInterval(SerelayError):
    pass


class InvalidDistance(SerelayError):
    pass


class InvalidAlpha(SerelayError):
    pass


class ZeroChannel(SerelayError):
    pass


class InfeasibleRecycling(SerelayError):
    """delta * eta * |f^H w_t|^2 >= 1: the recycled-power loop has no finite fixed point."""


class LeakageInfeasible(SerelayError):
    """The information-leakage constraint admits no transmit beamformer."""


class ConfigError(SerelayError):
    """Invalid configuration; ``key`` names the offending field."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key
