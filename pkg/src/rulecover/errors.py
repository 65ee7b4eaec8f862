"""Exception types shared across the package."""


class RulecoverError(Exception):
    """Base class for all rulecover errors."""


class DataError(RulecoverError, ValueError):
    """Malformed input data: bad values, length mismatch, or parse failure."""


class ConfigError(RulecoverError, ValueError):
    """Invalid configuration or an algorithm applied to unsuitable data."""


class InfeasibleError(RulecoverError, RuntimeError):
    """Computation refused because it would not finish at a sane scale."""
