"""Exception types shared across the package."""


class SpinQuenchError(Exception):
    """Base class for all package errors."""


class DimensionError(SpinQuenchError):
    """Register size or operator dimensions out of the supported range."""


class NonUnitaryError(SpinQuenchError):
    """A gate matrix failed the unitarity check."""


class ZeroProbabilityError(SpinQuenchError):
    """Renormalization requested for a projection with probability zero."""


class ConfigError(SpinQuenchError):
    """Invalid configuration file or run options."""
