"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, DataError -> 3,
NumericalError (and subclasses) -> 4.
"""


class ParapdeError(Exception):
    """Base class for all package errors."""


class ConfigError(ParapdeError):
    """Invalid configuration: bad parameter ranges, unknown keys, bad flags."""


class DataError(ParapdeError):
    """Malformed or inconsistent input data (shapes, files, metadata)."""


class NumericalError(ParapdeError):
    """A numerical procedure failed or degenerated."""


class SolverBlowupError(NumericalError):
    """Time integration produced non-finite or runaway values."""

    def __init__(self, step: int, max_abs: float):
        self.step = step
        self.max_abs = max_abs
        super().__init__(
            f"solver blow-up at output step {step}: max |u| = {max_abs:.3e}"
        )


class StepSizeError(NumericalError):
    """Explicit residual part exceeds the semi-implicit stability bound."""


class DegenerateTargetError(NumericalError):
    """Regression target has zero variance."""


class FilterError(NumericalError):
    """Frequency filtering retained too few entries; lower the percentile."""
