"""Exception types shared across the package."""


class SpreadbenchError(Exception):
    """Base class for all package-specific errors."""


class GraphParseError(SpreadbenchError):
    """Malformed or empty edge-list input."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class DegenerateThresholdError(SpreadbenchError):
    """Mean-field epidemic threshold undefined (<k^2> <= <k>)."""


class ParameterError(SpreadbenchError):
    """Invalid parameter for a metric or a simulation."""


class UndefinedCorrelationError(SpreadbenchError):
    """Pearson correlation undefined (constant input or too few points)."""


class FetchError(SpreadbenchError):
    """Dataset download failed."""


class IntegrityError(SpreadbenchError):
    """Downloaded file does not match the recorded content hash."""
