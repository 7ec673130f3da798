"""Exceptions raised across ltqdiag.

Every error carries a short stable `code` so the CLI can map it to an exit
status and JSON error payload.
"""

from __future__ import annotations


class LtqDiagError(Exception):
    code = "error"


class DimensionOutOfRange(LtqDiagError, ValueError):
    code = "dimension-out-of-range"


class InvalidVertex(LtqDiagError, ValueError):
    code = "invalid-vertex"


class SameVertex(LtqDiagError, ValueError):
    code = "same-vertex"


class EmptySet(LtqDiagError, ValueError):
    code = "empty-set"


class GOutOfRange(LtqDiagError, ValueError):
    code = "g-out-of-range"


class EqualSets(LtqDiagError, ValueError):
    code = "equal-sets"


class DomainMismatch(LtqDiagError, ValueError):
    code = "domain-mismatch"


class OutOfTheoremRange(LtqDiagError, ValueError):
    code = "out-of-theorem-range"


class FormatError(LtqDiagError, ValueError):
    code = "format-error"


class BudgetExceeded(LtqDiagError, RuntimeError):
    code = "budget-exceeded"

    def __init__(self, message: str, needed: int, budget: int):
        super().__init__(message)
        self.needed = needed
        self.budget = budget


class InvalidBound(LtqDiagError, ValueError):
    code = "invalid-bound"
