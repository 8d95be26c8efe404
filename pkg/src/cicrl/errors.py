"""Shared exception types."""


class ConfigError(ValueError):
    """Invalid configuration or hyperparameter combination."""


class NumericsError(ArithmeticError):
    """A training quantity became non-finite; the run cannot continue."""
