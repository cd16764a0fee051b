"""Exception types shared across the package."""


class FormatError(ValueError):
    """Malformed instance text; carries the 1-based line number when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CapacityError(RuntimeError):
    """Input exceeds a configured solver cap (bitset width, set count, ...)."""


class PreconditionError(ValueError):
    """A documented precondition of an operation does not hold."""


class BudgetExceededError(RuntimeError):
    """Backtracking search aborted after exhausting its expansion budget."""
