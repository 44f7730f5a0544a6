"""Exception types shared across the package."""


class InvalidInput(ValueError):
    """Raised when an argument violates a documented precondition."""


class InvalidAlpha(InvalidInput):
    """Raised when a mixing parameter falls outside [0, 1]."""


class NotPSD(ValueError):
    """Raised when a matrix that must be positive semi-definite is not,
    beyond the tolerated numerical slack."""


class DegenerateInput(ValueError):
    """Raised when data degenerate under the requested scaling (e.g. an
    all-constant feature matrix or target column) would force a division
    by zero."""


class IngestError(ValueError):
    """Raised on malformed input files; carries the offending line number
    when one is known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
