"""Shared exception types."""


class FogsimError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(FogsimError, ValueError):
    """Invalid configuration or option combination."""


class DepthFileError(FogsimError, ValueError):
    """Unreadable or malformed depth file."""


class DatasetError(FogsimError, ValueError):
    """Dataset or sequence layout problem (missing frames, bad annotations)."""
