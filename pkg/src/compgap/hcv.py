"""Hierarchical cumulative voting: allocations to absolute level-2 weights."""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass
from types import MappingProxyType
from typing import TYPE_CHECKING

import numpy as np

from .errors import (
    AllocationSumMismatch,
    DivisionByZeroWeight,
    LevelMismatch,
    OutOfRange,
    UnknownId,
    WeightCoverageGap,
    WeightSumViolation,
)
from .matrices import ScoreMatrix, WeightedMatrix

if TYPE_CHECKING:
    from .competence import CompetenceTree

SUM_TOL = 1e-9


def _sums_to(total: float, target: float) -> bool:
    return math.isclose(total, target, rel_tol=0.0, abs_tol=SUM_TOL * max(1.0, abs(target)))


@dataclass(frozen=True)
class HcvAllocation:
    """Points allocated top-down: ``level1[i]`` and ``level2[i][j]`` each sum to ``f``."""

    level1: Mapping[str, float]
    level2: Mapping[str, Mapping[str, float]]
    f: float = 100

    def __post_init__(self):
        if not self.f > 0:
            raise OutOfRange(f"allocation total f must be positive, got {self.f}")
        level1 = {k: float(v) for k, v in self.level1.items()}
        level2 = {g: MappingProxyType({k: float(v) for k, v in grp.items()}) for g, grp in self.level2.items()}
        if set(level2) != set(level1):
            raise WeightCoverageGap("level-2 groups must match the level-1 items one to one")
        self._check_group(level1, "level-1")
        for g, grp in level2.items():
            self._check_group(grp, f"group {g}")
        object.__setattr__(self, "level1", MappingProxyType(level1))
        object.__setattr__(self, "level2", MappingProxyType(level2))

    def _check_group(self, amounts: Mapping[str, float], where: str):
        if not amounts:
            raise WeightCoverageGap(f"{where} allocation is empty", location=where)
        for k, v in amounts.items():
            if not 0 <= v <= self.f:
                raise OutOfRange(f"amount {v} for {k} outside [0, {self.f}]", location=k)
        total = math.fsum(amounts.values())
        if not _sums_to(total, self.f):
            raise AllocationSumMismatch(f"{where} amounts sum to {total:g}, expected {self.f:g}", location=where)

    @classmethod
    def from_flat(
        cls,
        tree: CompetenceTree,
        hcv1: Mapping[str, float],
        hcv2: Mapping[str, float],
        f: float = 100,
    ) -> HcvAllocation:
        """Group a flat level-2 map by the tree's parent links."""
        for label, given, level in (("hcv1", hcv1, 1), ("hcv2", hcv2, 2)):
            expected = tree.level_ids(level)
            unknown = [k for k in given if k not in expected]
            if unknown:
                raise UnknownId(f"{label} has ids not at level {level}: {', '.join(unknown)}", location=label)
            missing = [k for k in expected if k not in given]
            if missing:
                raise WeightCoverageGap(f"{label} lacks amounts for {', '.join(missing)}", location=label)
        level2 = {root: {c: hcv2[c] for c in tree.children(root)} for root in tree.roots}
        return cls({r: hcv1[r] for r in tree.roots}, level2, f)

    @classmethod
    def uniform(cls, tree: CompetenceTree, f: float = 100) -> HcvAllocation:
        roots = tree.roots
        return cls(
            {r: f / len(roots) for r in roots},
            {r: {c: f / len(tree.children(r)) for c in tree.children(r)} for r in roots},
            f,
        )

    def group_of(self, cid: str) -> str:
        for g, grp in self.level2.items():
            if cid in grp:
                return g
        raise UnknownId(f"{cid!r} is not a level-2 item of this allocation")


@dataclass(frozen=True)
class WeightScheme:
    """Absolute weight per level-2 competence, summing to 1."""

    weights: Mapping[str, float]

    def __post_init__(self):
        w = {k: float(v) for k, v in self.weights.items()}
        if any(not 0 <= v <= 1 for v in w.values()):
            raise OutOfRange("absolute weights must lie in [0, 1]")
        if not _sums_to(math.fsum(w.values()), 1.0):
            raise WeightSumViolation(f"weights sum to {math.fsum(w.values())!r}, expected 1")
        object.__setattr__(self, "weights", MappingProxyType(w))

    def __getitem__(self, cid: str) -> float:
        return self.weights[cid]

    def __iter__(self):
        return iter(self.weights)

    def __len__(self) -> int:
        return len(self.weights)


def absolute_weights(alloc: HcvAllocation) -> WeightScheme:
    f = alloc.f
    raw = {
        cid: (alloc.level1[g] / f) * (y / f)
        for g, grp in alloc.level2.items()
        for cid, y in grp.items()
    }
    total = math.fsum(raw.values())
    if not _sums_to(total, 1.0):
        raise AllocationSumMismatch(f"products sum to {total!r}")
    return WeightScheme({cid: w / total for cid, w in raw.items()})


def apply_weights(matrix: ScoreMatrix, scheme: WeightScheme) -> WeightedMatrix:
    missing = [c for c in matrix.competences if c not in scheme.weights]
    if missing:
        raise WeightCoverageGap(f"no weight for {', '.join(missing)}")
    w = np.array([scheme[c] for c in matrix.competences])
    return WeightedMatrix(matrix.candidates, matrix.competences, matrix.values * w)


def relative_importance(source: HcvAllocation | WeightScheme, id_a: str, id_b: str) -> float:
    """How many times more important ``id_a`` is than ``id_b``.

    With an allocation, level-1 items compare their level-1 amounts and
    level-2 items compare amounts within their shared group. With a weight
    scheme, absolute weights are compared.
    """
    if isinstance(source, WeightScheme):
        for cid in (id_a, id_b):
            if cid not in source.weights:
                raise UnknownId(f"{cid!r} not in weight scheme")
        a, b = source[id_a], source[id_b]
    elif id_a in source.level1 or id_b in source.level1:
        if not (id_a in source.level1 and id_b in source.level1):
            raise LevelMismatch(f"{id_a} and {id_b} are not both level-1 items")
        a, b = source.level1[id_a], source.level1[id_b]
    else:
        group = source.group_of(id_a)
        if source.group_of(id_b) != group:
            raise LevelMismatch(f"{id_a} and {id_b} belong to different level-1 groups")
        a, b = source.level2[group][id_a], source.level2[group][id_b]
    if b == 0:
        raise DivisionByZeroWeight(f"{id_b} has zero weight")
    return a / b
