"""Exception hierarchy shared by all modules."""


class CannError(Exception):
    """Base class for library errors."""


class ConfigurationError(CannError, ValueError):
    """Invalid setup: bad grid, stencil, config file, incompatible data."""


class ShapeError(CannError, ValueError):
    """Array dimensions do not match the network or stencil."""


class EvaluationError(CannError, ArithmeticError):
    """A function produced a non-finite value where a finite one is required."""


class DivergenceError(CannError, ArithmeticError):
    """A time march or training run produced non-finite state.

    ``where`` carries the location, e.g. ``{"n": 0, "i": 12, "j": 3}``.
    """

    def __init__(self, message: str, **where):
        super().__init__(message)
        self.where = where


class UndefinedOrderError(CannError, ValueError):
    """Convergence order requested from non-positive errors."""


class AmbiguousJumpError(CannError, ValueError):
    """Field crosses the mid-state more than once."""

    def __init__(self, message: str, crossings):
        super().__init__(message)
        self.crossings = list(crossings)
