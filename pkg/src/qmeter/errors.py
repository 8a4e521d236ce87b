"""Exception types raised across the package."""


class ShapeError(ValueError):
    """Operand dimensions are incompatible."""


class NotHermitianError(ValueError):
    """A matrix expected to be Hermitian is not, within tolerance."""


class NotPositiveError(ValueError):
    """A matrix expected to be positive semidefinite has a negative eigenvalue."""


class CompletenessError(ValueError):
    """Kraus operators do not sum to the identity (sum K^dag K != I)."""


class ClassificationError(ValueError):
    """An operation requires an efficient measurement but got a general instrument."""


class ConsistencyError(RuntimeError):
    """Two independent computations of the same verdict disagree."""


class SchemaError(ValueError):
    """An input document does not match the expected schema."""
