"""Exception types shared across the library."""


class CapacityError(RuntimeError):
    """Requested computation exceeds the configured memory/compute budget."""


class ConfigError(ValueError):
    """Invalid experiment configuration."""
