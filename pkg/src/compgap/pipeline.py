"""End-to-end run: ACD level 3 -> rollups -> weighting -> gaps -> ANOVA -> Scott-Knott."""

from __future__ import annotations

import json
import shutil
import tempfile
from collections.abc import Mapping
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .assessment import (
    REQUIRED_ROW,
    AssessmentTypeWeights,
    DescriptiveStats,
    RollupWeights,
    describe,
    level1_scores,
    rcd_matrix,
    rollup,
)
from .competence import CompetenceTree, JobProfile
from .errors import CompgapError, EmptyInput, InvalidAlpha, OutOfRange
from .formatting import ROUNDING_MODES, fmt
from .gaps import QualificationPoint, gap_scores, qs_geometry, qualification_points
from .hcv import WeightScheme, absolute_weights, apply_weights
from .io import csv_text
from .matrices import GAP_KINDS, AcdMatrix, GapMatrix, WeightedMatrix
from .plot import PlotPoint, render_qs_svg
from .ranking import (
    POLICIES,
    AnovaTable,
    ClusterPartition,
    EligibilityResult,
    RankedRow,
    apply_policy,
    filter_eligible,
    rank_and_label,
    rcbd_anova,
    scott_knott,
)

OUTPUT_FILES = (
    "acd_level2.csv", "acd_level1.csv", "stats.csv", "weights.csv", "weighted.csv",
    "gaps.csv", "qs_points.csv", "anova.csv", "ranking.csv", "result.json", "qs_plot.svg",
)
# precision of the ANOVA export, matching how such tables are usually printed
ANOVA_DECIMALS = {"ss": 6, "ms": 6, "f": 3, "partial_eta_squared": 3}


@dataclass(frozen=True)
class PipelineConfig:
    alpha: float = 0.05
    gap_kind: str = "SG"
    policy: str = "most_qualified"
    display_decimals: int = 2
    rounding: str = "half_away"
    stats_rounding: str = "half_even"
    assessment_type_weights: Mapping[str, float] | None = None
    rollup_weights: Mapping[str, Mapping[str, float]] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise InvalidAlpha(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.display_decimals < 0:
            raise OutOfRange("display_decimals must be >= 0")
        if self.policy not in POLICIES:
            raise OutOfRange(f"policy must be one of {POLICIES}")
        if self.gap_kind not in GAP_KINDS:
            raise OutOfRange(f"gap_kind must be one of {GAP_KINDS}")
        for mode in (self.rounding, self.stats_rounding):
            if mode not in ROUNDING_MODES:
                raise OutOfRange(f"rounding must be one of {sorted(ROUNDING_MODES)}")

    @classmethod
    def from_mapping(cls, data: Mapping, **overrides) -> PipelineConfig:
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise OutOfRange(f"unknown config key(s): {', '.join(sorted(unknown))}")
        merged = {**data, **{k: v for k, v in overrides.items() if v is not None}}
        return cls(**merged)

    def type_weights(self) -> AssessmentTypeWeights | None:
        if self.assessment_type_weights is None:
            return None
        return AssessmentTypeWeights(self.assessment_type_weights)

    def rollup_weights_for(self, tree: CompetenceTree, parent_level: int) -> RollupWeights:
        """Configured groups for parents at ``parent_level``; equal weights elsewhere."""
        groups = {}
        for parent in tree.level_ids(parent_level):
            kids = tree.children(parent)
            groups[parent] = self.rollup_weights.get(parent) or {c: 1.0 / len(kids) for c in kids}
        for parent in self.rollup_weights:
            if parent not in tree:
                raise OutOfRange(f"rollup weights given for unknown competence {parent!r}")
        return RollupWeights(groups)


@dataclass(frozen=True, eq=False)
class RunResult:
    config: PipelineConfig
    tree: CompetenceTree
    profile: JobProfile
    acd3: AcdMatrix
    eligibility: EligibilityResult
    acd2: AcdMatrix
    acd1: AcdMatrix
    total: Mapping[str, float]
    rcd2: AcdMatrix
    rcd1: AcdMatrix
    stats: Mapping[str, DescriptiveStats]
    weights: WeightScheme
    weighted_acd: WeightedMatrix
    weighted_rcd: WeightedMatrix
    gaps: GapMatrix
    export_gaps: GapMatrix
    points: tuple[QualificationPoint, ...]
    anova: AnovaTable | None
    partition: ClusterPartition
    ranking: tuple[RankedRow, ...]
    recommendation: tuple[tuple[RankedRow, ...], ...]

    @property
    def candidates(self) -> tuple[str, ...]:
        return self.eligibility.eligible


@contextmanager
def stage(name: str):
    """Tag any package error raised inside with the pipeline stage name."""
    try:
        yield
    except CompgapError as exc:
        if getattr(exc, "stage", None) is None:
            exc.stage = name
        raise


def statistics_table(acd1: AcdMatrix, total: Mapping[str, float]) -> dict[str, DescriptiveStats]:
    """Descriptive statistics for the overall score and each level-1 category."""
    out = {"Total": describe([total[c] for c in acd1.candidates])}
    for cid in acd1.competences:
        out[cid] = describe(acd1.column(cid))
    return out


def run_pipeline(
    tree: CompetenceTree,
    acd3: AcdMatrix,
    profile: JobProfile,
    config: PipelineConfig | None = None,
) -> RunResult:
    config = config or PipelineConfig()
    with stage("configuration"):
        w3 = config.rollup_weights_for(tree, 2)
        w2 = config.rollup_weights_for(tree, 1)
    with stage("eligibility"):
        elig = filter_eligible(acd3, profile.eligibility, tree, w3, w2)
        if not elig.eligible:
            raise EmptyInput("no candidate passes the eligibility rules")
        acd3_ok = acd3.select(elig.eligible)
    with stage("rollup"):
        scores = level1_scores(acd3_ok, tree, w3, w2)
        rcd3 = rcd_matrix(profile, tree)
        rcd2 = rollup(rcd3, w3, tree)
        rcd1 = rollup(rcd2, w2, tree)
    with stage("statistics"):
        stats = statistics_table(scores.level1, scores.total)
    with stage("weighting"):
        scheme = absolute_weights(profile.allocation)
        weighted_acd = apply_weights(scores.level2, scheme)
        weighted_rcd = apply_weights(rcd2, scheme)
    with stage("gaps"):
        gaps = gap_scores(weighted_acd, weighted_rcd, "SG")
        export = gaps if config.gap_kind == "SG" else gap_scores(weighted_acd, weighted_rcd, config.gap_kind)
        points = tuple(qualification_points(gaps))
    with stage("anova"):
        anova = rcbd_anova(gaps, strict=False) if len(gaps.candidates) >= 2 else None
    with stage("clustering"):
        s2 = anova.s2 if anova is not None else 0.0
        partition = scott_knott({p.candidate: p.msg for p in points}, s2, len(gaps.competences), config.alpha)
    with stage("ranking"):
        ranking = tuple(rank_and_label(partition, points, gaps))
        recommendation = tuple(tuple(g) for g in apply_policy(ranking, config.policy))
    return RunResult(
        config=config, tree=tree, profile=profile, acd3=acd3, eligibility=elig,
        acd2=scores.level2, acd1=scores.level1, total=scores.total, rcd2=rcd2, rcd1=rcd1,
        stats=stats, weights=scheme, weighted_acd=weighted_acd, weighted_rcd=weighted_rcd,
        gaps=gaps, export_gaps=export, points=points, anova=anova, partition=partition,
        ranking=ranking, recommendation=recommendation,
    )


# -- rendering ---------------------------------------------------------------

def _matrix_table(matrix, extra=None, decimals=2, mode="half_away") -> str:
    """Competences as rows, candidates (then an optional Req column) as columns."""
    header = ["competence", *matrix.candidates] + ([REQUIRED_ROW] if extra is not None else [])
    rows = []
    for j, cid in enumerate(matrix.competences):
        cells = [fmt(v, decimals, mode) for v in matrix.values[:, j]]
        if extra is not None:
            cells.append(fmt(extra.values[0, j], decimals, mode))
        rows.append([cid, *cells])
    return csv_text(header, rows)


def stats_rows(result_stats: Mapping[str, DescriptiveStats], tree: CompetenceTree, decimals: int, mode: str):
    for key, st in result_stats.items():
        name = "Total" if key == "Total" else tree.node(key).name
        yield [key, name, st.n, *(fmt(v, decimals, mode) for v in (st.mean, st.sd, st.median, st.min, st.max))]


STATS_HEADER = ("competence", "name", "N", "M", "SD", "Mdn", "min", "max")


def plot_points(result: RunResult) -> list[PlotPoint]:
    return [PlotPoint(p.candidate, p.soq, p.suq, result.partition.cluster_index(p.candidate)) for p in result.points]


def result_dict(result: RunResult) -> dict:
    """Everything at full precision, JSON-ready."""
    cfg = result.config
    cluster_of = {r.candidate: r.cluster for r in result.ranking}
    anova = None
    if result.anova is not None:
        a = result.anova
        anova = {
            "rows": [asdict(r) for r in a.rows],
            "total_ss": a.total_ss,
            "total_df": a.total_df,
            "s2": a.s2,
            "degenerate": a.degenerate,
        }
    return {
        "config": {
            "alpha": cfg.alpha, "gap_kind": cfg.gap_kind, "policy": cfg.policy,
            "display_decimals": cfg.display_decimals, "rounding": cfg.rounding,
            "stats_rounding": cfg.stats_rounding,
            "assessment_type_weights": None if cfg.assessment_type_weights is None else dict(cfg.assessment_type_weights),
            "rollup_weights": {k: dict(v) for k, v in cfg.rollup_weights.items()},
        },
        "job_id": result.profile.job_id,
        "tree_shape": result.tree.shape(),
        "candidates": list(result.acd3.candidates),
        "eligible": list(result.candidates),
        "exclusions": [
            {"candidate": e.candidate, "competence": e.rule.competence, "min_score": e.rule.min_score,
             "score": e.score, "description": e.rule.description}
            for e in result.eligibility.excluded
        ],
        "acd_level3": result.acd3.as_dict(),
        "acd_level2": result.acd2.as_dict(),
        "acd_level1": result.acd1.as_dict(),
        "total": dict(result.total),
        "rcd_level2": result.rcd2.as_dict()[REQUIRED_ROW],
        "rcd_level1": result.rcd1.as_dict()[REQUIRED_ROW],
        "stats": {k: asdict(v) for k, v in result.stats.items()},
        "weights": dict(result.weights.weights),
        "weighted_acd": result.weighted_acd.as_dict(),
        "weighted_rcd": result.weighted_rcd.as_dict()[REQUIRED_ROW],
        "gaps": result.gaps.as_dict(),
        "export_gap_kind": result.export_gaps.kind,
        "qs_points": [
            {**asdict(p), "side": qs_geometry(p).side, "cluster": cluster_of[p.candidate]} for p in result.points
        ],
        "anova": anova,
        "scott_knott": {
            "clusters": [{"members": list(c.members), "mean": c.mean} for c in result.partition.clusters],
            "tests": [asdict(t) for t in result.partition.tests],
        },
        "ranking": [asdict(r) for r in result.ranking],
        "recommendation": {
            "policy": cfg.policy,
            "clusters": [[r.candidate for r in group] for group in result.recommendation],
        },
    }


def ranking_csv(result: RunResult) -> str:
    d, mode = result.config.display_decimals, result.config.rounding
    return csv_text(
        ("rank", "candidate", "msg", "lower", "upper", "cluster", "qualification"),
        ([r.rank, r.candidate, fmt(r.msg, d, mode), fmt(r.lower, d, mode), fmt(r.upper, d, mode), r.cluster, r.qualification]
         for r in result.ranking),
    )


def anova_csv(anova: AnovaTable | None, mode: str = "half_away") -> str:
    header = ("factor", "ss", "df", "ms", "f", "p", "partial_eta_squared")
    if anova is None:
        return csv_text(header, [])
    dec = ANOVA_DECIMALS
    rows = [
        [r.name, fmt(r.ss, dec["ss"], mode), r.df, fmt(r.ms, dec["ms"], mode), fmt(r.f, dec["f"], mode),
         fmt(r.p, 4, mode), fmt(r.partial_eta_squared, dec["partial_eta_squared"], mode)]
        for r in anova.rows
    ]
    rows.append(["total", fmt(anova.total_ss, dec["ss"], mode), anova.total_df, "", "", "", ""])
    return csv_text(header, rows)


def render_outputs(result: RunResult) -> dict[str, str]:
    cfg = result.config
    d, mode, smode = cfg.display_decimals, cfg.rounding, cfg.stats_rounding
    level1_ids = result.acd1.competences
    files = {
        "acd_level2.csv": _matrix_table(result.acd2, result.rcd2, d, mode),
        "acd_level1.csv": csv_text(
            ("candidate", "Total", *level1_ids),
            ([c, fmt(result.total[c], d, smode), *(fmt(v, d, smode) for v in result.acd1.row(c))]
             for c in result.acd1.candidates),
        ),
        "stats.csv": csv_text(STATS_HEADER, stats_rows(result.stats, result.tree, d, smode)),
        "weights.csv": csv_text(("id", "weight"), ([k, f"{w:.12g}"] for k, w in result.weights.weights.items())),
        "weighted.csv": _matrix_table(result.weighted_acd, result.weighted_rcd, d, mode),
        "gaps.csv": _matrix_table(result.export_gaps, None, d, mode),
        "qs_points.csv": csv_text(
            ("candidate", "SOQ", "SUQ", "MSG", "MAG", "side"),
            ([p.candidate, *(fmt(v, d, mode) for v in (p.soq, p.suq, p.msg, p.mag)), qs_geometry(p).side]
             for p in result.points),
        ),
        "anova.csv": anova_csv(result.anova, mode),
        "ranking.csv": ranking_csv(result),
        "result.json": json.dumps(result_dict(result), indent=2, sort_keys=True) + "\n",
        "qs_plot.svg": render_qs_svg(plot_points(result)),
    }
    assert tuple(sorted(files)) == tuple(sorted(OUTPUT_FILES))
    return files


def write_outputs(result: RunResult, out_dir: str | Path) -> Path:
    """Write all artifacts; nothing is left behind if rendering or writing fails."""
    out = Path(out_dir)
    if out.exists() and any(out.iterdir()) and not (out / "result.json").exists():
        raise FileExistsError(f"{out} exists, is not empty and does not hold a previous run")
    files = render_outputs(result)
    out.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=f".{out.name}-", dir=out.parent))
    try:
        for name, text in files.items():
            (tmp / name).write_text(text, encoding="utf-8", newline="")
        if out.exists():
            shutil.rmtree(out)
        tmp.rename(out)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    return out


def plot_points_from_result_json(data: Mapping) -> list[PlotPoint]:
    return [PlotPoint(p["candidate"], p["soq"], p["suq"], int(p.get("cluster", 1))) for p in data["qs_points"]]

