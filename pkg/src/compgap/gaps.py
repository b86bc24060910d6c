"""Gap functions, over/under-qualification sums and Qualification Space geometry."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import ColumnMismatch, KindMismatch, NonpositiveN, SignViolation
from .matrices import GapMatrix, ScoreMatrix

OVER = "over-qualified"
UNDER = "under-qualified"
EQUILIBRIUM = "equilibrium"


def gap_scores(acd: ScoreMatrix, rcd: ScoreMatrix, kind: str = "SG") -> GapMatrix:
    """Gap between each candidate row of ``acd`` and the single ``rcd`` row.

    Both inputs are expected to be weighted already, so SG entries equal
    w * (A - R).
    """
    if rcd.values.shape[0] != 1:
        raise ColumnMismatch(f"required scores must be a single row, got {rcd.values.shape[0]}")
    if tuple(acd.competences) != tuple(rcd.competences):
        if set(acd.competences) != set(rcd.competences):
            raise ColumnMismatch("ACD and RCD cover different competences")
        rcd = ScoreMatrix(rcd.candidates, acd.competences, [[rcd.value(rcd.candidates[0], c) for c in acd.competences]])
    diff = acd.values - rcd.values[0]
    if kind == "SG":
        g = diff
    elif kind == "AG":
        g = np.abs(diff)
    elif kind == "SQG":
        g = diff**2
    else:
        raise KindMismatch(f"unknown gap kind {kind!r}")
    return GapMatrix(acd.candidates, acd.competences, g, kind=kind)


def soq_suq(gap_row: Sequence[float] | np.ndarray, kind: str = "SG") -> tuple[float, float]:
    """(sum of over-qualification, sum of under-qualification) for one candidate.

    Zero gaps count as over-qualification; SUQ is returned signed (<= 0).
    """
    if kind != "SG":
        raise KindMismatch(f"over/under-qualification sums need simple gaps, got {kind}")
    g = [float(x) for x in gap_row]
    soq = math.fsum(x for x in g if x >= 0)
    suq = math.fsum(x for x in g if x < 0)
    return soq, suq


def msg_mag(soq: float, suq: float, n: int) -> tuple[float, float]:
    if n < 1:
        raise NonpositiveN(f"number of competences must be >= 1, got {n}")
    return (soq + suq) / n, (soq + abs(suq)) / n


@dataclass(frozen=True)
class QualificationPoint:
    candidate: str
    soq: float
    suq: float
    msg: float
    mag: float

    @property
    def side(self) -> str:
        return qs_geometry(self).side


@dataclass(frozen=True)
class QsGeometry:
    segment: float  # signed length of the horizontal+vertical path to the diagonal
    manhattan: float
    side: str


def qs_geometry(point: QualificationPoint) -> QsGeometry:
    if point.soq < 0 or point.suq > 0:
        raise SignViolation(f"need SOQ >= 0 and SUQ <= 0, got ({point.soq}, {point.suq})")
    segment = point.soq + point.suq
    side = OVER if segment > 0 else UNDER if segment < 0 else EQUILIBRIUM
    return QsGeometry(segment, point.soq + abs(point.suq), side)


def qualification_points(gaps: GapMatrix) -> list[QualificationPoint]:
    """One QS point per candidate of a simple-gap matrix."""
    if gaps.kind != "SG":
        raise KindMismatch(f"qualification points need simple gaps, got {gaps.kind}")
    n = len(gaps.competences)
    points = []
    for cand, row in zip(gaps.candidates, gaps.values):
        soq, suq = soq_suq(row)
        msg, mag = msg_mag(soq, suq, n)
        points.append(QualificationPoint(cand, soq, suq, msg, mag))
    return points
