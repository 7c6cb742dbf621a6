"""Shared exception types."""


class DimensionMismatchError(ValueError):
    """Operands live over different mode counts."""


class ValidationError(ValueError):
    """Input fails a structural precondition (unitarity, orthonormality, ...)."""


class SizingError(ValueError):
    """Requested truncated-space size is outside the supported envelope."""
