"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid experiment or circuit configuration."""


class ShapeError(ValueError):
    """Array lengths or dimensions do not match."""


class ValidationError(ValueError):
    """Input violates a numerical precondition (hermiticity, norm, ...)."""
