"""Toolkit for deciding whether a candidate retrieval system should replace an incumbent.

Ingests run files, relevance judgments, query/collection text, and cost
measurements; applies effectiveness, efficiency, and robustness criteria;
and combines them through a significance rule and a Pareto rule into a
deploy/reject verdict with a self-contained evidence bundle.
"""

from .bundle import dumps_bundle, parse_bundle, render_report, write_bundle
from .config import CostCap, CriterionSpec, FrameworkConfig, parse_config, parse_costs
from .costs import (
    WEIGHT_PRESETS,
    AggregatedCost,
    CostFactor,
    CostTable,
    aggregate_cost,
    check_efficiency,
    comparative_transform,
)
from .data import (
    Collection,
    Qrels,
    Query,
    QuerySet,
    RunFile,
    format_run,
    parse_collection,
    parse_queries,
    parse_qrels,
    parse_run,
)
from .decision import (
    CriterionRecord,
    Objective,
    ParetoResult,
    SystemPoint,
    Verdict,
    apply_cost_cap,
    decide_candidate,
    pareto_frontier,
    pareto_rule,
    significance_rule,
    utility_rank,
)
from .errors import ConfigError, EvaluationError, ParseError, RetdecideError
from .guardrails import GuardrailReport, MarginReport, check_margin, margin_regressions, run_guardrail
from .metrics import (
    MetricSpec,
    PerQueryScores,
    evaluate,
    mean_score,
    ndcg_at_k,
    precision_at_k,
    recall_at_k,
    rr_at_k,
)
from .outcomes import Outcome, OutcomeLabel
from .significance import (
    ComparisonResult,
    classify,
    compare,
    paired_t_test,
    regularized_incomplete_beta,
    robustness_check,
    student_t_two_sided_p,
)
from .slicing import (
    QuerySlice,
    jaccard_distance,
    slice_by_length,
    slice_by_lexical_overlap,
    slice_by_min_frequency,
    slice_from_file,
    slice_out_of_distribution,
)
from .tokenization import Tokenizer, make_tokenizer, tokenize
from .workflow import DecisionInputs, apply_scenario, run_decision

__version__ = "0.1.0"

__all__ = [
    "AggregatedCost",
    "Collection",
    "ComparisonResult",
    "ConfigError",
    "CostCap",
    "CostFactor",
    "CostTable",
    "CriterionRecord",
    "CriterionSpec",
    "DecisionInputs",
    "EvaluationError",
    "FrameworkConfig",
    "GuardrailReport",
    "MarginReport",
    "MetricSpec",
    "Objective",
    "Outcome",
    "OutcomeLabel",
    "ParetoResult",
    "ParseError",
    "PerQueryScores",
    "Qrels",
    "Query",
    "QuerySet",
    "QuerySlice",
    "RetdecideError",
    "RunFile",
    "SystemPoint",
    "Tokenizer",
    "Verdict",
    "WEIGHT_PRESETS",
    "aggregate_cost",
    "apply_cost_cap",
    "apply_scenario",
    "check_efficiency",
    "check_margin",
    "classify",
    "comparative_transform",
    "compare",
    "decide_candidate",
    "dumps_bundle",
    "evaluate",
    "format_run",
    "jaccard_distance",
    "make_tokenizer",
    "margin_regressions",
    "mean_score",
    "ndcg_at_k",
    "paired_t_test",
    "pareto_frontier",
    "pareto_rule",
    "parse_bundle",
    "parse_collection",
    "parse_config",
    "parse_costs",
    "parse_queries",
    "parse_qrels",
    "parse_run",
    "precision_at_k",
    "recall_at_k",
    "regularized_incomplete_beta",
    "render_report",
    "robustness_check",
    "rr_at_k",
    "run_decision",
    "run_guardrail",
    "significance_rule",
    "slice_by_length",
    "slice_by_lexical_overlap",
    "slice_by_min_frequency",
    "slice_from_file",
    "slice_out_of_distribution",
    "student_t_two_sided_p",
    "tokenize",
    "utility_rank",
    "write_bundle",
]
