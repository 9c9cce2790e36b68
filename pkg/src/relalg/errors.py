"""Shared exception types."""


class ResourceBudgetError(RuntimeError):
    """A computation would exceed a configured size/memory budget.

    Raised instead of silently attempting work that cannot finish at desk
    scale (huge bases, oversized exhaustive searches).  Callers may retry
    with a larger explicit budget.
    """


class ParseError(ValueError):
    """Syntax error in a term, equation, or data file.

    ``position`` is a 0-based character offset for term strings, or a
    1-based line number for data files.
    """

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at {position})"
        super().__init__(message)
