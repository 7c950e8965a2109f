class BetaEnsembleError(Exception):
    """Base class for all errors raised by the package."""


class PoleError(BetaEnsembleError, ZeroDivisionError):
    """Evaluation landed on a pole (of a map, kernel, or jet denominator)."""


class ContourError(BetaEnsembleError):
    pass


class SolverError(BetaEnsembleError):
    pass


class CurveError(BetaEnsembleError):
    """The potential does not give a regular one-cut spectral curve."""


class DomainError(BetaEnsembleError, ValueError):
    pass


class ConfigError(BetaEnsembleError, ValueError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
