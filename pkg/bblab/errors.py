"""
bblab/errors.py
-----------------------------------------------------------------------------
Exception hierarchy shared by every bblab module.

All exceptions derive from ``LatticeError``, itself a ``ValueError``, so
callers that only care about "bad input" can keep catching ``ValueError``.

Exports
-------
LatticeError, DimensionError, SingularMatrixError, DegenerateLatticeError,
NotAnIsometryError, GlueError, UnresolvedConstantError, RuleConsistencyError,
LedgerError
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


class LatticeError(ValueError):
    """Base class for all bblab errors."""


class DimensionError(LatticeError):
    """Matrix or vector shapes do not fit the requested operation."""


class SingularMatrixError(LatticeError):
    """A linear system was posed on a singular matrix."""


class DegenerateLatticeError(LatticeError):
    """Discriminant data was requested for a lattice with det 0."""


class NotAnIsometryError(LatticeError):
    """A matrix fails to preserve a Gram matrix, or is not an involution."""


class GlueError(LatticeError):
    """A glue vector pairs non-integrally with the lattice or with itself."""

    def __init__(self, message: str, vector: Sequence[Fraction | int]) -> None:
        super().__init__(f"{message}: {[str(x) for x in vector]}")
        self.vector = tuple(Fraction(x) for x in vector)


class UnresolvedConstantError(LatticeError):
    """The pairing of the point class with the square of delta was used before it was solved."""


class RuleConsistencyError(LatticeError):
    """
    The degree-4 pairing rules produced an inconsistent result.

    ``diagnostics`` holds whatever the failing step could report (offending
    entries, scan tables, determinants) so the caller can log or print it.
    """

    def __init__(self, message: str, diagnostics: dict | None = None) -> None:
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class LedgerError(LatticeError):
    """A dimension ledger is inconsistent or has no unique integer solution."""
