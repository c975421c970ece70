"""Custom exceptions for the logictext toolkit."""


class LogicTextError(Exception):
    """Base exception for logictext errors."""

    pass


class FormError(LogicTextError):
    """Exception raised when a logical form cannot be tokenized or parsed."""

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message if position is None else f"{message} (token {position})")
        self.position = position


class EmptyForm(FormError):
    """Exception raised for empty or whitespace-only logical forms."""

    pass


class UnbalancedBraces(FormError):
    """Exception raised when braces do not pair up."""

    pass


class StraySeparator(FormError):
    """Exception raised for a ';' outside any clause."""

    pass


class MalformedClause(FormError):
    """Exception raised when a clause does not have the `op { a ; b }` shape."""

    pass


class EmptyArgument(FormError):
    """Exception raised for an empty clause argument."""

    pass


class ShapeError(LogicTextError):
    """Exception raised when matrix dimensions do not match."""

    pass


class UnknownHeader(LogicTextError):
    """Exception raised when a header is not part of a sample's table."""

    pass


class EmptyDataset(LogicTextError):
    """Exception raised when an operation needs at least one sample."""

    pass


class NotEligible(LogicTextError):
    """Exception raised when no replaceable header exists."""

    pass


class PoolExhausted(LogicTextError):
    """Exception raised when a header pool has no alternative candidate."""

    pass


class LengthMismatch(LogicTextError):
    """Exception raised when gold and predicted sequences are not aligned."""

    pass


class SchemaError(LogicTextError):
    """Exception raised for a malformed dataset record."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class ConfigurationError(LogicTextError):
    """Exception raised for configuration issues."""

    pass
