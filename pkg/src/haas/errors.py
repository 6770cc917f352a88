"""Exception types shared across the simulator."""


class HaasError(Exception):
    """Base class for all simulator errors."""


class ValidationError(HaasError):
    """A value violates a declared invariant (out-of-range score, bad weights, ...)."""


class ContractViolation(HaasError):
    """An operation was invoked with arguments that break its precondition."""


class DegenerateInputError(HaasError):
    """Statistical routine received input it cannot produce a result for."""


class ConfigError(HaasError):
    """A run/battery configuration is inconsistent and was rejected before simulation."""
