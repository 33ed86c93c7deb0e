"""Shared exception types."""


class UnsupportedDomainError(ValueError):
    """Raised when an operation has no defined answer for the given domain."""


class InvalidGeometryError(ValueError):
    """Raised for degenerate geometric input (zero-area faces, flat tetrahedra, ...)."""


class ResourceLimitError(RuntimeError):
    """Raised when an exact computation would exceed its big-integer budget."""


class BudgetExceededError(RuntimeError):
    """Raised when a study's estimated cost exceeds the refusal threshold."""
