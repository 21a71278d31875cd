"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument violates a documented precondition or invariant."""


class DegenerateInputError(RuntimeError):
    """An input is structurally unusable (e.g. a realization with no base
    stations); callers are expected to resample or abort."""


class ConfigError(ValueError):
    """A configuration file or command line could not be validated.

    Carries a human-readable location (``path:line``) where applicable.
    """
