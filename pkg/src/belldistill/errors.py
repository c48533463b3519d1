"""Exception hierarchy shared by all modules."""


class BellDistillError(Exception):
    """Base class for errors raised by this package."""


class ParameterError(BellDistillError, ValueError):
    """An argument is outside its documented domain."""


class ShapeError(BellDistillError, ValueError):
    """Array dimensions do not match what the operation expects."""


class DimensionLimitError(BellDistillError, ValueError):
    """A dense object would exceed the configured dimension cap."""


class ContractError(BellDistillError, ValueError):
    """A numeric precondition failed (non-Hermitian operator, non-PSD state, ...)."""
