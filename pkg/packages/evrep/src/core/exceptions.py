"""
Exception Classes Module

This module provides the exception hierarchy for the evrep library:
- A single base class so callers can catch every library failure at once
- Argument, dimension and scheme validation errors
- Numerical failures (ill-conditioned Gram matrices, invalid or degenerate states)
- File format errors raised by the JSON/CSV readers
"""

import typing

if typing.TYPE_CHECKING:
    from ..frames.quorum import ConditionReport


class EvrepError(Exception):
    """Base class for all evrep exceptions."""
    pass


class ValidationError(EvrepError):
    """Raised when an argument fails validation."""
    pass


class DimensionMismatchError(ValidationError):
    """Raised when an operator or vector does not have the expected size."""
    def __init__(self, what: str, expected: int, got: int):
        super().__init__(f"{what}: expected size {expected}, got {got}")
        self.what = what
        self.expected = expected
        self.got = got


class SchemeError(ValidationError):
    """Raised when a direction scheme violates its invariants."""
    pass


class IllConditionedSchemeError(EvrepError):
    """Raised when the Gram matrix of a quorum is numerically singular."""
    def __init__(self, condition_number: float, report: typing.Optional["ConditionReport"] = None):
        super().__init__(
            f"Gram matrix is numerically singular (condition number {condition_number:.3e})"
        )
        self.condition_number = condition_number
        self.report = report


class InvalidStateError(EvrepError):
    """Raised when a density matrix is not positive semidefinite."""
    def __init__(self, message: str, min_eigenvalue: typing.Optional[float] = None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class DegenerateStateError(EvrepError):
    """Raised when an operator's trace is too small to normalize."""
    def __init__(self, trace: float):
        super().__init__(f"Cannot normalize an operator with trace {trace:.3e}")
        self.trace = trace


class FileFormatError(EvrepError):
    """Raised when an input file is malformed or has the wrong version."""
    def __init__(self, path: str, details: str):
        super().__init__(f"Invalid file {path}: {details}")
        self.path = path
        self.details = details
