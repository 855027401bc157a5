"""Shared exception types."""


class ParameterError(ValueError):
    """Raised when an operation receives arguments outside its stated domain."""
