class ConfigurationError(ValueError):
    """Invalid parameters or scenario configuration."""


class InputError(ValueError):
    """Malformed input data (dose schedules, record files)."""


class QueryError(ValueError):
    """A query outside the range covered by logged data."""
