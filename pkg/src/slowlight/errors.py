"""Exception hierarchy shared by all slowlight modules."""


class SlowLightError(Exception):
    """Base class for every error raised by the package."""


class PoleError(SlowLightError, ValueError):
    """Gamma function evaluated at (or numerically on top of) a pole."""


class DomainError(SlowLightError, ValueError):
    """Argument outside the supported domain of an operation."""


class DegenerateError(SlowLightError, ArithmeticError):
    """A denominator vanished where the formula needs it finite."""


class NormDriftError(SlowLightError, RuntimeError):
    """Numerical integration let the atomic state norm drift too far."""


class ConfigError(SlowLightError, ValueError):
    """Inconsistent configuration (grid, boundary data, scenario)."""


class SchemaError(ConfigError):
    """Unknown or ill-typed key in a scenario document.

    ``path`` is the dotted key path of the offending entry.
    """

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class ValidationError(ConfigError):
    """A scenario parsed fine but violates a physical invariant."""


class OutputError(SlowLightError, OSError):
    """Writing output files failed; ``path`` names the target."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")
