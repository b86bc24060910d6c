"""Competence gap analysis: hierarchical rollups, HCV weighting, RCBD ANOVA and Scott-Knott ranking."""

from .assessment import (
    AssessmentTypeWeights,
    DescriptiveStats,
    RollupWeights,
    StatementResponse,
    combine_assessment_types,
    describe,
    level1_scores,
    responses_to_acd3,
    rollup,
    score_statement_set,
)
from .competence import (
    CompetenceNode,
    CompetenceTree,
    EligibilityRule,
    JobProfile,
    build_job_profile,
    build_tree,
    importance_to_score,
    tree_query,
)
from .distributions import chi_sq_critical
from .gaps import QualificationPoint, gap_scores, msg_mag, qs_geometry, qualification_points, soq_suq
from .hcv import HcvAllocation, WeightScheme, absolute_weights, apply_weights, relative_importance
from .matrices import AcdMatrix, GapMatrix, WeightedMatrix
from .pipeline import PipelineConfig, RunResult, run_pipeline, write_outputs
from .ranking import (
    AnovaTable,
    ClusterPartition,
    apply_policy,
    best_split,
    effect_size_label,
    filter_eligible,
    rank_and_label,
    rcbd_anova,
    scott_knott,
)

__version__ = "0.1.0"
