"""From statement responses to ACD matrices at levels 3, 2 and 1."""

from __future__ import annotations

import math
import statistics
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

from ._util import natural_key
from .competence import MAX_LEVEL, CompetenceTree, JobProfile, id_level
from .errors import (
    EmptyInput,
    EmptyResponseSet,
    IncompleteMatrix,
    LevelMismatch,
    MissingTypeValue,
    MixedKeys,
    OutOfRange,
    ParseError,
    ScoreOutOfRange,
    UnknownId,
    WeightCoverageGap,
    WeightSumViolation,
)
from .matrices import AcdMatrix

ASSESSMENT_TYPES = ("multi_source", "self_assessment")
ASSESSOR_ROLES = ("self", "colleague", "manager")
WEIGHT_TOL = 1e-9
REQUIRED_ROW = "Req"


@dataclass(frozen=True)
class StatementResponse:
    assessee: str
    competence: str
    statement_id: str
    value: int
    weight: float
    assessor_role: str = "self"
    assessment_type: str = "self_assessment"

    def __post_init__(self):
        if isinstance(self.value, bool) or int(self.value) != self.value or not 1 <= self.value <= 5:
            raise ScoreOutOfRange(f"Likert value must be an integer in 1..5, got {self.value!r}")
        if not 0 <= self.weight <= 1:
            raise OutOfRange(f"statement weight {self.weight} outside [0, 1]")
        if self.assessor_role not in ASSESSOR_ROLES:
            raise ParseError(f"unknown assessor role {self.assessor_role!r}")
        if self.assessment_type not in ASSESSMENT_TYPES:
            raise ParseError(f"unknown assessment type {self.assessment_type!r}")

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.assessee, self.competence, self.assessment_type)


def score_statement_set(responses: Sequence[StatementResponse]) -> float:
    """Weighted mean of the Likert answers for one (assessee, competence, type)."""
    if not responses:
        raise EmptyResponseSet("no responses to score")
    keys = {r.key for r in responses}
    if len(keys) > 1:
        raise MixedKeys(f"responses span {len(keys)} (assessee, competence, type) keys")
    total_w = math.fsum(r.weight for r in responses)
    if abs(total_w - 1.0) > WEIGHT_TOL:
        raise WeightSumViolation(f"statement weights sum to {total_w!r}", location="/".join(next(iter(keys))))
    return math.fsum(r.weight * r.value for r in responses)


@dataclass(frozen=True)
class AssessmentTypeWeights:
    """Weight per assessment type; stored normalized to sum 1."""

    weights: Mapping[str, float]

    def __post_init__(self):
        w = {k: float(v) for k, v in self.weights.items()}
        if any(v < 0 or not math.isfinite(v) for v in w.values()):
            raise OutOfRange("assessment-type weights must be non-negative")
        total = math.fsum(w.values())
        if total <= 0:
            raise WeightSumViolation("assessment-type weights sum to zero")
        object.__setattr__(self, "weights", MappingProxyType({k: v / total for k, v in w.items()}))

    @classmethod
    def equal(cls, types: Iterable[str]) -> AssessmentTypeWeights:
        return cls({t: 1.0 for t in types})


def combine_assessment_types(
    values: Mapping[str, float],
    weights: AssessmentTypeWeights | Mapping[str, float] | None = None,
) -> float:
    """Level-3 ACD value as the weighted sum over assessment types."""
    if not values:
        raise EmptyResponseSet("no assessment-type values")
    if weights is None:
        weights = AssessmentTypeWeights.equal(values)
    elif not isinstance(weights, AssessmentTypeWeights):
        weights = AssessmentTypeWeights(weights)
    w = weights.weights
    missing = [t for t, wt in w.items() if wt > 0 and t not in values]
    if missing:
        raise MissingTypeValue(f"no value for assessment type(s) {', '.join(missing)}")
    unweighted = [t for t in values if t not in w]
    if unweighted:
        raise WeightCoverageGap(f"no weight for assessment type(s) {', '.join(unweighted)}")
    return math.fsum(wt * values[t] for t, wt in w.items() if wt > 0)


def responses_to_acd3(
    responses: Iterable[StatementResponse],
    tree: CompetenceTree,
    type_weights: AssessmentTypeWeights | Mapping[str, float] | None = None,
) -> AcdMatrix:
    """Aggregate raw statement responses into the level-3 ACD matrix."""
    groups: dict[tuple[str, str, str], list[StatementResponse]] = defaultdict(list)
    for r in responses:
        if r.competence not in tree:
            raise UnknownId(f"response for unknown competence {r.competence!r}")
        if id_level(r.competence) != MAX_LEVEL:
            raise LevelMismatch(f"responses must target level-3 competences, got {r.competence}")
        groups[r.key].append(r)
    if not groups:
        raise EmptyInput("no responses")
    per_cell: dict[tuple[str, str], dict[str, float]] = defaultdict(dict)
    for (who, comp, at), rs in groups.items():
        per_cell[(who, comp)][at] = score_statement_set(rs)
    candidates = sorted({who for who, _ in per_cell}, key=natural_key)
    leaves = tree.leaves
    values = np.empty((len(candidates), len(leaves)))
    for i, who in enumerate(candidates):
        for j, leaf in enumerate(leaves):
            cell = per_cell.get((who, leaf))
            if cell is None:
                raise IncompleteMatrix(f"no responses for {who} on {leaf}", location=f"{leaf}/{who}")
            values[i, j] = combine_assessment_types(cell, type_weights)
    return AcdMatrix(candidates, leaves, values, level=3)


@dataclass(frozen=True)
class RollupWeights:
    """Per parent id, the weights of its children (each group sums to 1)."""

    groups: Mapping[str, Mapping[str, float]]

    def __post_init__(self):
        frozen = {}
        for parent, kids in self.groups.items():
            w = {k: float(v) for k, v in kids.items()}
            if any(not 0 <= v <= 1 for v in w.values()):
                raise OutOfRange(f"rollup weights under {parent} must lie in [0, 1]", location=parent)
            if abs(math.fsum(w.values()) - 1.0) > WEIGHT_TOL:
                raise WeightSumViolation(f"rollup weights under {parent} sum to {math.fsum(w.values())!r}", location=parent)
            frozen[parent] = MappingProxyType(w)
        object.__setattr__(self, "groups", MappingProxyType(frozen))

    @classmethod
    def equal(cls, tree: CompetenceTree, parent_level: int) -> RollupWeights:
        return cls({
            p: {c: 1.0 / len(tree.children(p)) for c in tree.children(p)}
            for p in tree.level_ids(parent_level)
        })


def rollup(child: AcdMatrix, weights: RollupWeights | None, tree: CompetenceTree) -> AcdMatrix:
    """Weighted means of each parent's children, one level up."""
    k = child.level
    if k not in (2, 3) or any(id_level(c) != k for c in child.competences):
        raise LevelMismatch(f"rollup needs a level-2 or level-3 matrix, got level {k}")
    expected = tree.level_ids(k)
    if set(child.competences) != set(expected):
        missing = [c for c in expected if c not in child.competences]
        raise IncompleteMatrix(
            f"matrix columns differ from the tree's level-{k} set; missing: {', '.join(missing) or '-'}"
        )
    if weights is None:
        weights = RollupWeights.equal(tree, k - 1)
    parents = tree.level_ids(k - 1)
    col = {c: j for j, c in enumerate(child.competences)}
    out = np.empty((len(child.candidates), len(parents)))
    for p_idx, parent in enumerate(parents):
        kids = tree.children(parent)
        group = weights.groups.get(parent)
        if group is None or set(group) != set(kids):
            raise WeightCoverageGap(f"rollup weights do not cover the children of {parent}", location=parent)
        w = np.array([group[c] for c in kids])
        out[:, p_idx] = child.values[:, [col[c] for c in kids]] @ w
    # convex combinations of [1, 5] scores can drift by an ulp
    np.clip(out, 1.0, 5.0, out=out)
    return AcdMatrix(child.candidates, parents, out, level=k - 1)


@dataclass(frozen=True, eq=False)
class LevelOneScores:
    level2: AcdMatrix
    level1: AcdMatrix
    total: Mapping[str, float]


def level1_scores(
    acd3: AcdMatrix,
    tree: CompetenceTree,
    weights3: RollupWeights | None = None,
    weights2: RollupWeights | None = None,
) -> LevelOneScores:
    """Level-2 and level-1 rollups plus each candidate's mean over all leaves."""
    acd2 = rollup(acd3, weights3, tree)
    acd1 = rollup(acd2, weights2, tree)
    total = {c: float(np.mean(row)) for c, row in zip(acd3.candidates, acd3.values)}
    return LevelOneScores(acd2, acd1, MappingProxyType(total))


def rcd_matrix(profile: JobProfile, tree: CompetenceTree, label: str = REQUIRED_ROW) -> AcdMatrix:
    """The job's required level-3 scores as a one-row matrix."""
    leaves = tree.leaves
    return AcdMatrix((label,), leaves, [[profile.rcd3[leaf] for leaf in leaves]], level=3)


@dataclass(frozen=True)
class DescriptiveStats:
    n: int
    mean: float
    sd: float | None
    median: float
    min: float
    max: float


def describe(values: Sequence[float]) -> DescriptiveStats:
    data = [float(v) for v in values]
    if not data:
        raise EmptyInput("describe() needs at least one value")
    return DescriptiveStats(
        n=len(data),
        mean=statistics.mean(data),
        sd=statistics.stdev(data) if len(data) >= 2 else None,
        median=statistics.median(data),
        min=min(data),
        max=max(data),
    )
