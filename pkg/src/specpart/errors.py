"""Exception families; each maps to a distinct CLI exit code."""


class SpecpartError(Exception):
    exit_code = 1


class ConfigError(SpecpartError, ValueError):
    """Invalid input or configuration."""

    exit_code = 1


class ResolutionError(SpecpartError):
    """Grid too coarse (or too fine for the budget) for the requested object."""

    exit_code = 2


class ConvergenceError(SpecpartError):
    """An iterative solver did not reach its tolerance.

    ``residuals`` holds the best residual norms reached, ``best`` the best
    iterate (if any).
    """

    exit_code = 3

    def __init__(self, msg, residuals=None, best=None):
        super().__init__(msg)
        self.residuals = residuals
        self.best = best


class InvariantError(SpecpartError):
    """A stated mathematical invariant failed on computed data."""

    exit_code = 4
