"""Exception types shared across the package."""


class HilmoError(Exception):
    pass


class DimensionError(HilmoError, ValueError):
    """Array or table shapes do not match the declared interface."""


class DomainError(HilmoError, ValueError):
    """An index or value lies outside its declared domain."""


class ContractError(HilmoError, ValueError):
    """An operation was called on data violating its precondition."""


class ResourceLimitError(HilmoError, RuntimeError):
    """An enumeration guard (history count, policy count) was exceeded."""


class ModelFormatError(HilmoError, ValueError):
    """A serialized tabular model is malformed or not normalized."""


class CheckpointError(HilmoError, ValueError):
    """A checkpoint file has a wrong version tag or is truncated."""


class ConfigError(HilmoError, ValueError):
    """A run configuration key or value is invalid."""
