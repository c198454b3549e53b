"""Exception types shared across the package.

The CLI maps these onto process exit codes: configuration problems exit 2,
solver failures exit 3, file I/O problems exit 4.
"""


class ConfigError(ValueError):
    """Bad or inconsistent run configuration (unknown key, missing value, ...)."""


class InvalidStateError(ValueError):
    """A decoded state has nonpositive density or pressure."""

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class StepError(RuntimeError):
    """A time step failed; carries the step index and RK stage."""

    def __init__(self, message, step=None, stage=None):
        super().__init__(message)
        self.step = step
        self.stage = stage


class HaloProtocolError(RuntimeError):
    """A halo message arrived with the wrong shape, dtype, or tag."""


class SolutionFormatError(ValueError):
    """A solution file failed magic/shape validation on read."""
