"""Exception types shared across the package."""

from __future__ import annotations


class CbdError(Exception):
    """Base class for all package errors."""


class ParseError(CbdError):
    """Malformed JSON document or rational literal."""


class ValidationError(CbdError):
    """A system failed validation; ``violations`` lists every problem found."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"{len(self.violations)} violation(s): {lines}")


class UnknownContent(CbdError, KeyError):
    def __str__(self):
        return f"unknown content {self.args[0]!r}"


class UnknownCell(CbdError, KeyError):
    def __str__(self):
        return f"unknown cell {self.args[0]}"


class ValueSetMismatch(CbdError, ValueError):
    pass


class NotBinary(CbdError, ValueError):
    pass


class MarginalMismatch(CbdError, ValueError):
    pass


class TooLarge(CbdError):
    """The joint outcome space exceeds the configured budget."""

    def __init__(self, size: int, budget: int, what: str = "joint outcome space"):
        self.size = size
        self.budget = budget
        super().__init__(f"{what} has {size} outcomes, budget is {budget}")


class DimensionMismatch(CbdError, ValueError):
    pass


class InvalidRank(CbdError, ValueError):
    pass


class InvalidSplit(CbdError, ValueError):
    pass


class InvalidPartition(CbdError, ValueError):
    pass
