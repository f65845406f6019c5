"""Shared exception types."""


class FocnError(Exception):
    """Base class for errors raised on invalid input or misuse."""


class ParseError(FocnError):
    """Malformed text input; carries a 1-based line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SphereShapeError(FocnError):
    """Sphere comparison across incompatible signature, center count, or radius."""


class BudgetError(FocnError):
    """A brute-force routine refused an input beyond its configured budget."""


class GenerationError(FocnError):
    """A generator could not produce or verify the requested object."""
