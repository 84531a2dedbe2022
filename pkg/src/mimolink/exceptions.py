"""Exception types shared across the package."""


class MimolinkError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(MimolinkError, ValueError):
    """Raised for invalid or inconsistent configuration values."""


class DimensionError(MimolinkError, ValueError):
    """Raised when array shapes do not match the system model."""


class FramingError(MimolinkError, ValueError):
    """Raised when a bit frame cannot be segmented as required
    (e.g. a coded frame length incompatible with the puncturing period).
    """
