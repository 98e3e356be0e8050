"""Exception types shared across the toolkit."""


class AlphaCloakError(Exception):
    """Base class for all toolkit errors."""


class ShapeError(AlphaCloakError, ValueError):
    """Frame or clip dimensions do not line up."""


class FormatError(AlphaCloakError, ValueError):
    """A file does not conform to its container format."""


class UnsupportedFeatureError(FormatError):
    """The file is valid but uses a feature this toolkit does not handle."""


class ParseError(FormatError):
    """A text input failed to parse; carries the offending line number."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number
