"""Exception types shared across the package."""


class InputError(ValueError):
    """Invalid argument to a library function."""


class ConfigError(InputError):
    """Malformed or incomplete run configuration."""


class MajorantViolation(RuntimeError):
    """A pairwise relative speed exceeded the majorant rate U_max.

    Signals that umax_factor is too small for the current ensemble; the
    step is aborted rather than silently clamping the rate.
    """


class TimeStepError(RuntimeError):
    """The configured dt makes collisions too frequent per step."""
