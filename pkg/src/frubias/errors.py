"""Exception hierarchy.

Every error carries the name of the module that raised it so the CLI can
report provenance. ``ValidationError`` and its subclasses map to exit code 2,
everything else to exit code 1.
"""


class FrubiasError(Exception):
    module = "frubias"

    def __init__(self, message, module=None):
        super().__init__(message)
        if module is not None:
            self.module = module


class ValidationError(FrubiasError, ValueError):
    """Input data or arguments violate a precondition."""


class ParseError(ValidationError):
    """A data file could not be parsed."""

    def __init__(self, message, row=None, module="dataset"):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message, module=module)
        self.row = row


class ConfigurationError(ValidationError):
    """Invalid operator or parameter configuration."""


class DomainError(ValidationError):
    """A fuzzy operator received an argument outside [0, 1]."""
