"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class ConvergenceError(RuntimeError):
    """A refinement loop ran out of budget before two iterates agreed.

    The last two iterates are kept on the exception so callers can inspect
    how far apart they were.
    """

    def __init__(self, message, previous=None, current=None):
        super().__init__(message)
        self.previous = previous
        self.current = current


class ParseError(ValueError):
    """Malformed function spec or expression; ``position`` is a 0-based offset."""

    def __init__(self, message, text="", position=0):
        super().__init__(f"{message} (at position {position} in {text!r})")
        self.text = text
        self.position = position


class InconclusiveError(RuntimeError):
    """An interval check could not decide the sign of a margin."""
