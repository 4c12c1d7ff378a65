"""Exception types shared across qslab."""


class QSLabError(Exception):
    """Base class for all qslab errors."""


class PrecisionExhausted(QSLabError):
    """Certified intervals failed to separate within the precision budget."""


class WindowTooSmall(QSLabError):
    pass


class EmptyOverlap(QSLabError):
    pass


class ArcBudgetExceeded(QSLabError):
    """An induced-map iteration produced more arcs than the configured cap."""


class EpsilonUnreachable(QSLabError):
    """No Rokhlin tower of the requested quality exists for this angle and height."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class CoreNotAdmissible(QSLabError):
    pass


class PreimageFailed(QSLabError):
    pass


class ConfigError(QSLabError):
    pass
