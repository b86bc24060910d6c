"""Exception hierarchy.

Every error exposes ``rule`` (its class name) so validators can report the
violated rule by name. ``ModelError`` subclasses describe bad input and map
to CLI exit status 1; ``ComputationError`` subclasses arise while computing
and map to exit status 2.
"""

from __future__ import annotations


class CompgapError(Exception):
    """Base class for all package errors."""

    def __init__(self, message: str = "", *, location: str | None = None):
        super().__init__(message)
        self.location = location

    @property
    def rule(self) -> str:
        return type(self).__name__

    def describe(self) -> str:
        where = f" at {self.location}" if self.location else ""
        return f"{self.rule}{where}: {self}"


class ModelError(CompgapError):
    pass


class ComputationError(CompgapError):
    pass


# competence tree / job profile
class DuplicateId(ModelError):
    pass


class MissingParent(ModelError):
    pass


class DepthViolation(ModelError):
    pass


class OrphanInternal(ModelError):
    pass


class UnknownId(ModelError):
    pass


class UnknownTerm(ModelError):
    pass


class AllocationSumMismatch(ModelError):
    pass


class IncompleteRcd(ModelError):
    pass


class ScoreOutOfRange(ModelError):
    pass


class ParseError(ModelError):
    pass


# assessment
class WeightSumViolation(ModelError):
    pass


class MixedKeys(ModelError):
    pass


class EmptyResponseSet(ModelError):
    pass


class MissingTypeValue(ModelError):
    pass


class WeightCoverageGap(ModelError):
    pass


class LevelMismatch(ModelError):
    pass


class IncompleteMatrix(ModelError):
    pass


class ColumnMismatch(ModelError):
    pass


class KindMismatch(ModelError):
    pass


class UnknownCompetenceInRule(ModelError):
    pass


class CandidateMismatch(ModelError):
    pass


class InvalidAlpha(ModelError):
    pass


class OutOfRange(ModelError):
    pass


class UnsortedInput(ModelError):
    pass


class SignViolation(ModelError):
    pass


class EmptyPointSet(ModelError):
    pass


# computation
class EmptyInput(ComputationError):
    pass


class NonpositiveN(ComputationError):
    pass


class TooFewMeans(ComputationError):
    pass


class DivisionByZeroWeight(ComputationError):
    pass


class DegenerateVariance(ComputationError):
    pass


class NonpositiveVariance(ComputationError):
    pass
