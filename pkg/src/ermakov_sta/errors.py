"""Exception hierarchy.

Every numerical failure derives from :class:`NumericalError` so the CLI can
map it to a single exit status; configuration problems are ``ConfigError``.
"""


class StaError(Exception):
    """Base class for all package errors."""


class ConfigError(StaError, ValueError):
    pass


class NumericalError(StaError):
    pass


class NoPositiveRoot(NumericalError):
    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class CollapseError(NumericalError):
    """Width dropped below the collapse floor during integration."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class IntegrationError(NumericalError):
    """Adaptive step controller stalled or the solver reported failure."""


class QuadratureFailure(NumericalError):
    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class InvalidSwitch(NumericalError):
    pass


class NonConvergence(NumericalError):
    pass


class NoGroundState(NumericalError):
    pass


class NormDrift(NumericalError):
    pass


class GridMismatch(StaError, ValueError):
    pass


class TimeStepTooLarge(StaError, ValueError):
    pass
