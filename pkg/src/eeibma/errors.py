class EEIBMAError(Exception):
    """Base class for all package errors."""


class ConfigError(EEIBMAError, ValueError):
    """A configuration value is missing, malformed or out of range.

    ``field`` names the offending setting, e.g. ``traffic.p_base``.
    """

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class StageError(EEIBMAError):
    """A pipeline stage (traffic, predictor, energy) failed."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
