# src/errors.py
"""
Exception hierarchy for singpoincare.

Every error carries the process exit code the CLI maps it to:
  1 -> usage / parse problems (bad job files, bad flags)
  2 -> math-domain errors raised by the library
  3 -> engine and oracle disagree
Library code raises, only src/cli.py turns these into exit codes.
"""
from __future__ import annotations

from typing import Any, Optional


class SingPoincareError(Exception):
    exit_code = 2

    def __init__(self, message: str = "", **context: Any):
        super().__init__(message)
        self.message = message
        self.context = context

    def __str__(self) -> str:
        if not self.context:
            return self.message
        extra = ", ".join(f"{k}={v}" for k, v in self.context.items())
        return f"{self.message} ({extra})"


# =========================================================
# USAGE / PARSE (exit 1)
# =========================================================
class ParseError(SingPoincareError):
    exit_code = 1

    def __init__(self, message: str, line: Optional[int] = None,
                 column: Optional[int] = None, location: Optional[str] = None):
        super().__init__(message)
        self.line = line
        self.column = column
        self.location = location

    def __str__(self) -> str:
        if self.line is not None:
            return f"line {self.line}, column {self.column}: {self.message}"
        if self.location:
            return f"{self.location}: {self.message}"
        return self.message


class JobError(SingPoincareError):
    exit_code = 1


# =========================================================
# MATH DOMAIN (exit 2)
# =========================================================
class SingularMatrix(SingPoincareError):
    pass


class DimensionMismatch(SingPoincareError):
    pass


class Disconnected(SingPoincareError):
    pass


class BadReference(SingPoincareError):
    pass


class NotUnimodular(SingPoincareError):
    pass


class NotNegativeDefinite(SingPoincareError):
    pass


class SingularIntersectionMatrix(SingPoincareError):
    pass


class NotPrimitive(SingPoincareError):
    pass


class IndistinguishableBranches(SingPoincareError):
    pass


class TruncationTooShort(SingPoincareError):
    pass


class SeedNotGeneric(SingPoincareError):
    pass


class UnknownComponent(SingPoincareError):
    pass


class UnknownBranch(SingPoincareError):
    pass


class NotWellDefined(SingPoincareError):
    pass


class NotDivisible(SingPoincareError):
    pass


class HypothesisViolated(SingPoincareError):
    pass


class SeedsDisagree(SingPoincareError):
    pass


class NonIntegralPresentation(SingPoincareError):
    pass


class DegenerateSubstitution(SingPoincareError):
    pass


# =========================================================
# ORACLE (exit 3)
# =========================================================
class OracleMismatch(SingPoincareError):
    exit_code = 3


# =========================================================
# WARNINGS
# =========================================================
class TruncationLoss(UserWarning):
    """Result is only valid to a lower truncation than requested."""
