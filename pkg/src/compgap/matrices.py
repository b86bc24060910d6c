"""Labelled candidate x competence score matrices."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import (
    CandidateMismatch,
    DuplicateId,
    IncompleteMatrix,
    KindMismatch,
    ScoreOutOfRange,
    SignViolation,
    UnknownId,
)

SCORE_MIN, SCORE_MAX = 1.0, 5.0
GAP_KINDS = ("SG", "AG", "SQG")


def _frozen_array(values, shape: tuple[int, int]) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    if arr.shape != shape:
        raise IncompleteMatrix(f"expected a {shape[0]}x{shape[1]} matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise IncompleteMatrix("matrix contains missing or non-finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ScoreMatrix:
    """Rows are candidates, columns competences."""

    candidates: tuple[str, ...]
    competences: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        object.__setattr__(self, "competences", tuple(self.competences))
        for label, items in (("candidate", self.candidates), ("competence", self.competences)):
            if len(set(items)) != len(items):
                raise DuplicateId(f"duplicate {label} label")
        object.__setattr__(
            self, "values", _frozen_array(self.values, (len(self.candidates), len(self.competences)))
        )

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def row(self, candidate: str) -> np.ndarray:
        try:
            return self.values[self.candidates.index(candidate)]
        except ValueError:
            raise CandidateMismatch(f"unknown candidate {candidate!r}") from None

    def column(self, competence: str) -> np.ndarray:
        try:
            return self.values[:, self.competences.index(competence)]
        except ValueError:
            raise UnknownId(f"competence {competence!r} not in matrix") from None

    def value(self, candidate: str, competence: str) -> float:
        return float(self.row(candidate)[self.competences.index(competence)])

    def _replace(self, candidates: Sequence[str], values: np.ndarray):
        fields = {k: getattr(self, k) for k in self.__dataclass_fields__}
        fields.update(candidates=tuple(candidates), values=values)
        return type(self)(**fields)

    def select(self, candidates: Sequence[str]):
        """Same matrix restricted to (and reordered by) ``candidates``."""
        idx = []
        for c in candidates:
            if c not in self.candidates:
                raise CandidateMismatch(f"unknown candidate {c!r}")
            idx.append(self.candidates.index(c))
        return self._replace(candidates, self.values[idx, :])

    def as_dict(self) -> dict[str, dict[str, float]]:
        return {
            c: {k: float(v) for k, v in zip(self.competences, row)}
            for c, row in zip(self.candidates, self.values)
        }


@dataclass(frozen=True, eq=False)
class AcdMatrix(ScoreMatrix):
    """Assessed scores at one tree level; every value lies in [1, 5]."""

    level: int = 3

    def __post_init__(self):
        super().__post_init__()
        bad = (self.values < SCORE_MIN) | (self.values > SCORE_MAX)
        if bad.any():
            i, j = map(int, np.argwhere(bad)[0])
            raise ScoreOutOfRange(
                f"score {self.values[i, j]} outside [1, 5]",
                location=f"{self.competences[j]}/{self.candidates[i]}",
            )


@dataclass(frozen=True, eq=False)
class WeightedMatrix(ScoreMatrix):
    """Scores after multiplication by absolute competence weights."""


@dataclass(frozen=True, eq=False)
class GapMatrix(ScoreMatrix):
    kind: str = "SG"

    def __post_init__(self):
        super().__post_init__()
        if self.kind not in GAP_KINDS:
            raise KindMismatch(f"gap kind must be one of {GAP_KINDS}, got {self.kind!r}")
        if self.kind != "SG" and (self.values < 0).any():
            raise SignViolation(f"{self.kind} gaps cannot be negative")
