"""Eligibility filtering, RCBD ANOVA and Scott-Knott ranking/clustering."""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from ._util import natural_key
from .assessment import RollupWeights, rollup
from .competence import CompetenceTree, EligibilityRule, id_level
from .distributions import chi_sq_critical, f_sf
from .errors import (
    CandidateMismatch,
    DegenerateVariance,
    EmptyInput,
    IncompleteMatrix,
    KindMismatch,
    NonpositiveVariance,
    OutOfRange,
    TooFewMeans,
    UnknownCompetenceInRule,
    UnsortedInput,
)
from .gaps import QualificationPoint
from .matrices import AcdMatrix, GapMatrix

__all__ = [
    "EligibilityRule",
    "filter_eligible",
    "rcbd_anova",
    "effect_size_label",
    "chi_sq_critical",
    "best_split",
    "scott_knott",
    "rank_and_label",
    "apply_policy",
]

POLICIES = ("most_qualified", "closest_fit")
SK_CONSTANT = math.pi / (2.0 * (math.pi - 2.0))
EFFECT_BENCHMARKS = ((0.14, "large"), (0.06, "medium"), (0.01, "small"))


# -- eligibility -----------------------------------------------------------

@dataclass(frozen=True)
class Exclusion:
    candidate: str
    rule: EligibilityRule
    score: float


@dataclass(frozen=True)
class EligibilityResult:
    eligible: tuple[str, ...]
    excluded: tuple[Exclusion, ...]


def filter_eligible(
    acd3: AcdMatrix,
    rules: Sequence[EligibilityRule],
    tree: CompetenceTree,
    weights3: RollupWeights | None = None,
    weights2: RollupWeights | None = None,
) -> EligibilityResult:
    """Keep candidates meeting every minimum; report every violated rule."""
    for rule in rules:
        if rule.competence not in tree:
            raise UnknownCompetenceInRule(f"rule references unknown competence {rule.competence!r}")
    by_level = {3: acd3}
    if any(id_level(r.competence) < 3 for r in rules):
        by_level[2] = rollup(acd3, weights3, tree)
    if any(id_level(r.competence) == 1 for r in rules):
        by_level[1] = rollup(by_level[2], weights2, tree)
    excluded = []
    for cand in acd3.candidates:
        for rule in rules:
            score = by_level[id_level(rule.competence)].value(cand, rule.competence)
            if score < rule.min_score:
                excluded.append(Exclusion(cand, rule, score))
    dropped = {e.candidate for e in excluded}
    return EligibilityResult(tuple(c for c in acd3.candidates if c not in dropped), tuple(excluded))


# -- RCBD ANOVA ------------------------------------------------------------

@dataclass(frozen=True)
class FactorRow:
    name: str
    ss: float
    df: int
    ms: float
    f: float | None = None
    p: float | None = None
    partial_eta_squared: float | None = None


@dataclass(frozen=True)
class AnovaTable:
    treatments: FactorRow
    blocks: FactorRow
    error: FactorRow
    total_ss: float
    total_df: int
    degenerate: bool = False

    @property
    def s2(self) -> float:
        """Error mean square."""
        return self.error.ms

    @property
    def rows(self) -> tuple[FactorRow, FactorRow, FactorRow]:
        return (self.treatments, self.blocks, self.error)


def rcbd_anova(gaps: GapMatrix, strict: bool = True) -> AnovaTable:
    """Two-way additive ANOVA: candidates as treatments, competences as blocks.

    With ``strict`` a zero error sum of squares raises DegenerateVariance;
    otherwise the table comes back with ``degenerate=True`` and F/p unset.
    """
    if gaps.kind != "SG":
        raise KindMismatch(f"ANOVA runs on simple gaps, got {gaps.kind}")
    y = gaps.values
    t, c = y.shape
    if t < 2 or c < 2:
        raise IncompleteMatrix(f"need at least 2 candidates and 2 blocks, got {t}x{c}")
    grand = y.mean()
    row_means = y.mean(axis=1)
    col_means = y.mean(axis=0)
    ss_treat = c * float(np.sum((row_means - grand) ** 2))
    ss_block = t * float(np.sum((col_means - grand) ** 2))
    resid = y - row_means[:, None] - col_means[None, :] + grand
    scale = float(np.max(np.abs(y)))
    degenerate = float(np.max(np.abs(resid))) <= 1e-12 * scale or scale == 0.0
    sse = 0.0 if degenerate else float(np.sum(resid**2))
    df_t, df_b = t - 1, c - 1
    df_e = df_t * df_b
    if degenerate and strict:
        raise DegenerateVariance("error sum of squares is zero; F is undefined")
    mse = sse / df_e
    return AnovaTable(
        treatments=_rcbd_factor("candidates", ss_treat, df_t, sse, df_e, degenerate),
        blocks=_rcbd_factor("blocks", ss_block, df_b, sse, df_e, degenerate),
        error=FactorRow("error", sse, df_e, mse),
        total_ss=float(np.sum((y - grand) ** 2)),
        total_df=t * c - 1,
        degenerate=degenerate,
    )


def _rcbd_factor(name: str, ss: float, df: int, sse: float, df_e: int, degenerate: bool) -> FactorRow:
    ms = ss / df
    if degenerate:
        return FactorRow(name, ss, df, ms, None, None, 1.0 if ss > 0 else None)
    f = ms / (sse / df_e)
    return FactorRow(name, ss, df, ms, f, f_sf(f, df, df_e), ss / (ss + sse))


def effect_size_label(partial_eta2: float) -> str:
    if not 0.0 <= partial_eta2 <= 1.0:
        raise OutOfRange(f"partial eta squared must lie in [0, 1], got {partial_eta2}")
    for cut, label in EFFECT_BENCHMARKS:
        if partial_eta2 >= cut:
            return label
    return "negligible"


# -- Scott-Knott -------------------------------------------------------------

def _between_ss(means: np.ndarray, i: int, k_blocks: float) -> float:
    g1, g2 = means[:i], means[i:]
    grand = means.mean()
    return k_blocks * (len(g1) * (g1.mean() - grand) ** 2 + len(g2) * (g2.mean() - grand) ** 2)


def best_split(sorted_means: Sequence[float], k_blocks: float) -> tuple[int, float]:
    """Size of the lower group that maximizes the between-group sum of squares.

    Returns ``(i, bg_ss)`` where the split is ``means[:i] | means[i:]``; ties
    go to the smallest ``i``.
    """
    means = np.asarray(sorted_means, dtype=float)
    if means.size < 2:
        raise TooFewMeans("need at least two means to split")
    if np.any(np.diff(means) < 0):
        raise UnsortedInput("means must be sorted ascending")
    best_i, best = 1, _between_ss(means, 1, k_blocks)
    for i in range(2, means.size):
        ss = _between_ss(means, i, k_blocks)
        if ss > best + 1e-12 * max(abs(best), 1e-300):
            best_i, best = i, ss
    return best_i, float(best)


def sk_degrees_of_freedom(group_size: int) -> int:
    return max(1, round(group_size / (math.pi - 2.0)))


@dataclass(frozen=True)
class SplitTest:
    members: tuple[str, ...]  # ascending mean order
    split_at: int
    bg_ss: float
    lam: float
    nu: int
    critical: float
    significant: bool


@dataclass(frozen=True)
class Cluster:
    members: tuple[str, ...]  # descending mean
    mean: float


@dataclass(frozen=True)
class ClusterPartition:
    clusters: tuple[Cluster, ...]  # best (highest mean) first
    means: Mapping[str, float]
    tests: tuple[SplitTest, ...] = ()

    def cluster_index(self, candidate: str) -> int:
        for i, cl in enumerate(self.clusters, start=1):
            if candidate in cl.members:
                return i
        raise CandidateMismatch(f"{candidate!r} is not in the partition")

    @property
    def candidates(self) -> tuple[str, ...]:
        return tuple(c for cl in self.clusters for c in cl.members)


def _by_mean(means: Mapping[str, float], members, descending=False) -> list[str]:
    # ties resolved by natural candidate order so input order never matters
    sign = -1.0 if descending else 1.0
    return sorted(members, key=lambda m: (sign * means[m], natural_key(m)))


def scott_knott(
    msg_by_candidate: Mapping[str, float],
    s2: float,
    k_blocks: float,
    alpha: float = 0.05,
) -> ClusterPartition:
    """Recursive Scott-Knott partition of candidate mean gaps."""
    if not msg_by_candidate:
        raise EmptyInput("no candidates to cluster")
    means = {c: float(m) for c, m in msg_by_candidate.items()}
    if len(means) == 1:
        (cand, m), = means.items()
        return ClusterPartition((Cluster((cand,), m),), means)
    if not math.isfinite(s2) or s2 < 0:
        raise NonpositiveVariance(f"error variance must be positive, got {s2}")
    if s2 == 0:
        if len(set(means.values())) > 1:
            raise DegenerateVariance("error variance is zero; the split statistic is undefined")
        # identical means: no split can ever be significant
        only = _by_mean(means, means, descending=True)
        return ClusterPartition((Cluster(tuple(only), next(iter(means.values()))),), means)
    tests: list[SplitTest] = []
    groups: list[list[str]] = []

    def split(members: list[str]):
        if len(members) < 2:
            groups.append(members)
            return
        values = [means[m] for m in members]
        i, bg = best_split(values, k_blocks)
        lam = SK_CONSTANT * bg / s2
        nu = sk_degrees_of_freedom(len(members))
        crit = chi_sq_critical(nu, alpha)
        tests.append(SplitTest(tuple(members), i, bg, lam, nu, crit, lam > crit))
        if lam > crit:
            split(members[:i])
            split(members[i:])
        else:
            groups.append(members)

    split(_by_mean(means, means))
    clusters = [
        Cluster(tuple(_by_mean(means, g, descending=True)), math.fsum(means[m] for m in g) / len(g))
        for g in groups
    ]
    clusters.sort(key=lambda cl: -cl.mean)
    return ClusterPartition(tuple(clusters), means, tuple(tests))


# -- reporting -------------------------------------------------------------

@dataclass(frozen=True)
class RankedRow:
    rank: int
    candidate: str
    msg: float
    lower: float | None
    upper: float | None
    cluster: int
    qualification: str


def rank_and_label(
    partition: ClusterPartition,
    points: Sequence[QualificationPoint],
    gaps: GapMatrix,
) -> list[RankedRow]:
    """Rows by descending MSG with MSG -/+ one sample SD of the candidate's gaps."""
    by_cand = {p.candidate: p for p in points}
    if set(by_cand) != set(partition.means) or not set(by_cand) <= set(gaps.candidates):
        raise CandidateMismatch("partition, QS points and gap matrix cover different candidates")
    order = _by_mean({c: p.msg for c, p in by_cand.items()}, by_cand, descending=True)
    rows = []
    for rank, cand in enumerate(order, start=1):
        msg = by_cand[cand].msg
        g = gaps.row(cand)
        sd = float(np.std(g, ddof=1)) if g.size > 1 else None
        rows.append(
            RankedRow(
                rank=rank,
                candidate=cand,
                msg=msg,
                lower=None if sd is None else msg - sd,
                upper=None if sd is None else msg + sd,
                cluster=partition.cluster_index(cand),
                qualification="Over-" if msg >= 0 else "Under-",
            )
        )
    return rows


def apply_policy(rows: Sequence[RankedRow], policy: str = "most_qualified") -> list[list[RankedRow]]:
    """Group ranked rows by cluster and order the groups by hiring policy.

    ``most_qualified`` keeps the best-first cluster order; ``closest_fit``
    puts the cluster with the smallest mean |MSG| first. Order inside each
    cluster is left alone.
    """
    if policy not in POLICIES:
        raise ValueError(f"policy must be one of {POLICIES}, got {policy!r}")
    groups: dict[int, list[RankedRow]] = {}
    for row in sorted(rows, key=lambda r: r.rank):
        groups.setdefault(row.cluster, []).append(row)
    ordered = [groups[k] for k in sorted(groups)]
    if policy == "closest_fit":
        ordered.sort(key=lambda g: math.fsum(abs(r.msg) for r in g) / len(g))
    return ordered
