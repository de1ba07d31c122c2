"""Exception types raised across the package."""


class OrliczError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(OrliczError, ValueError):
    pass


class InvalidFunctionError(OrliczError, ValueError):
    """The supplied function violates an Orlicz-function axiom."""


class InvalidInputError(OrliczError, ValueError):
    pass


class DimensionMismatchError(OrliczError, ValueError):
    pass


class ConvergenceError(OrliczError, RuntimeError):
    pass


class BracketOverflowError(OrliczError, OverflowError):
    """A root or minimum bracket could not be found in representable range."""
