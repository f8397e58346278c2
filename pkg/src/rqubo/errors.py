class CapacityError(ValueError):
    """Raised when an exhaustive routine is asked for too many sites."""


class FormatError(ValueError):
    """Malformed instance text; carries the 1-based line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
