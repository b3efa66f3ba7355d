"""Exception types raised across the package."""


class PsgarchError(Exception):
    """Base class for all package errors."""


class InvalidInputError(PsgarchError, ValueError):
    pass


class InvalidConfigurationError(PsgarchError, ValueError):
    pass


class DegenerateInputError(PsgarchError, ValueError):
    """Input carries no usable variation (constant series, zero denominators)."""


class NumericFailure(PsgarchError, ArithmeticError):
    """A numerical routine failed; ``best`` holds the best point found, if any."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
