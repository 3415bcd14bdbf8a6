"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of an operation."""


class DegenerateDataError(DomainError):
    """Input data is degenerate (e.g. a constant margin with zero variance)."""


class NumericError(RuntimeError):
    """An iterative numerical procedure failed to converge.

    When raised by a fitting routine, ``best`` carries the best iterate
    found so far so callers can inspect or reuse it.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ConfigError(ValueError):
    """A study configuration is invalid.

    ``path`` locates the offending field, e.g. ``"scenarios[2].rho"``.
    """

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
