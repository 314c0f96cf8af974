"""Exception hierarchy shared by the engine, the services and the CLI."""


class DelayedChoiceError(Exception):
    """Base error; `code` is the machine-readable tag written to error records."""

    code = "error"
    exit_code = 1

    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


class ConfigurationError(DelayedChoiceError):
    """Invalid indices, grids, settings or flag values."""

    code = "configuration_error"
    exit_code = 2


class DomainError(ConfigurationError):
    """A probability parameter outside [0, 1]."""

    code = "domain_error"


class DegenerateConditionError(DelayedChoiceError):
    """Conditioning on an outcome or setting that carries no probability mass."""

    code = "degenerate_condition"
    exit_code = 3
