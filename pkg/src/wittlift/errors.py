"""Structured computation errors; the CLI reports them as JSON."""

from __future__ import annotations


class WittliftError(Exception):
    code = "computation_error"

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.message = message
        self.context = context

    def to_json(self) -> dict:
        return {"error": {"code": self.code, "message": self.message, "context": self.context}}


class DegreeError(WittliftError):
    code = "wrong_degree"


class SingularCurveError(WittliftError):
    code = "singular_curve"


class NotFSplitError(WittliftError):
    code = "not_f_split"


class PrimeTooSmallError(WittliftError):
    code = "prime_too_small"


class PrecisionError(WittliftError):
    code = "precision_validation_failed"


class NotPreservedError(WittliftError):
    code = "f1_not_preserved"


class NotOrdinaryError(WittliftError):
    code = "not_ordinary"


class DimensionDeficitError(WittliftError):
    code = "dimension_deficit"


class InconsistentInputError(WittliftError):
    code = "inconsistent_input"


class SplittingError(WittliftError):
    code = "invalid_splitting"


class SolverFailure(WittliftError):
    code = "solver_failure"
