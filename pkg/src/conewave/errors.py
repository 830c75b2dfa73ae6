"""Exception types shared across the package."""


class ConewaveError(Exception):
    """Base class for all conewave errors."""


class InvalidArgumentError(ConewaveError, ValueError):
    """A precondition on an argument was violated."""


class GridMismatchError(ConewaveError, ValueError):
    """Binary operation attempted on spectra with incompatible grids."""


class UnsupportedExponentError(ConewaveError, ValueError):
    """Exponent outside the locally integrable range handled by this package."""


class SingularPointError(ConewaveError, ValueError):
    """Evaluation requested exactly at a singular point without regularization."""


class StepTooCoarseError(ConewaveError, ValueError):
    """Finite-difference step too coarse for the requested evaluation radius."""


class DivergenceError(ConewaveError, RuntimeError):
    """An iteration produced NaN or overflow.  Records the failing iteration."""

    def __init__(self, message: str, iteration: int | None = None):
        super().__init__(message)
        self.iteration = iteration


class PartialTrackError(ConewaveError, RuntimeError):
    """Ray tracking found no singular point at one or more times."""

    def __init__(self, message: str, times=()):
        super().__init__(message)
        self.times = tuple(times)


class ValidationError(ConewaveError, ValueError):
    """A configuration failed fail-fast validation (CLI exit code 2)."""
