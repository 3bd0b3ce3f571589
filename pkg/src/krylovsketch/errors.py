"""Exception types shared across the package.

The CLI maps these onto exit codes, so everything raised on purpose should
derive from SketchError.
"""


class SketchError(Exception):
    """Base class for all errors raised by this package."""


class ArgumentError(SketchError, ValueError):
    """A caller-supplied value violates an operation's contract."""


class CapacityError(ArgumentError):
    """An input is too large for a desk-scale diagnostic routine."""


class ParseError(SketchError, ValueError):
    """A file's contents do not match the expected format."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NumericalError(SketchError, ArithmeticError):
    """A numerical routine failed to produce a usable result."""


class StateError(SketchError, RuntimeError):
    """An operation was called on an object in the wrong state."""
