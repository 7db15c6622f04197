"""Robustness criteria over query slices and the per-query margin rule.

A guardrail never blesses a deployment on its own: a win on a slice is
recorded but treated as neutral by the decision rule, while a significant
loss vetoes. The margin rule counts queries where the incumbent beats the
candidate by at least delta and fails when their fraction exceeds the
tolerated threshold; it can only produce a loss or a tie.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import EvaluationError
from .metrics import PerQueryScores
from .outcomes import Outcome, OutcomeLabel
from .significance import (
    DEFAULT_ALPHA,
    DEFAULT_MIN_SLICE_SIZE,
    ComparisonResult,
    common_queries,
    robustness_check,
)
from .slicing import QuerySlice


@dataclass(frozen=True)
class GuardrailReport:
    criterion_id: str
    slice: QuerySlice
    comparison: ComparisonResult | None
    outcome: OutcomeLabel
    slice_size: int  # paired queries actually compared
    skipped_count: int  # slice members not scored by both systems


@dataclass(frozen=True)
class MarginReport:
    delta: float
    regressed_query_ids: frozenset[str]
    regressed_fraction: float
    n_evaluated: int
    threshold: float | None = None
    outcome: OutcomeLabel | None = None


def run_guardrail(
    criterion_id: str,
    slice_: QuerySlice,
    scores_a: PerQueryScores,
    scores_b: PerQueryScores,
    alpha: float = DEFAULT_ALPHA,
    min_slice_size: int = DEFAULT_MIN_SLICE_SIZE,
) -> GuardrailReport:
    """Evaluate one robustness criterion over a slice."""
    paired = common_queries(scores_a, scores_b, slice_.query_ids)
    if not paired:
        raise EvaluationError(f"criterion {criterion_id}: slice {slice_.name!r} is empty after skip-filtering")
    outcome, comparison = robustness_check(
        scores_a, scores_b, slice_.query_ids, alpha=alpha, min_slice_size=min_slice_size
    )
    return GuardrailReport(
        criterion_id=criterion_id,
        slice=slice_,
        comparison=comparison,
        outcome=outcome,
        slice_size=len(paired),
        skipped_count=len(slice_.query_ids) - len(paired),
    )


def margin_regressions(
    scores_a: "PerQueryScores | dict[str, float]",
    scores_b: "PerQueryScores | dict[str, float]",
    delta: float,
) -> MarginReport:
    """Count queries where A beats B by at least delta.

    The denominator is the set of queries evaluated for both systems, so
    skipped queries appear in neither numerator nor denominator.
    """
    if not 0.0 < delta <= 1.0:
        raise EvaluationError(f"margin delta must be in (0, 1], got {delta}")
    a = scores_a.scores if isinstance(scores_a, PerQueryScores) else scores_a
    b = scores_b.scores if isinstance(scores_b, PerQueryScores) else scores_b
    paired = sorted(set(a) & set(b))
    if not paired:
        raise EvaluationError("no commonly evaluated queries for margin check")
    regressed = frozenset(q for q in paired if a[q] - b[q] >= delta)
    return MarginReport(
        delta=delta,
        regressed_query_ids=regressed,
        regressed_fraction=len(regressed) / len(paired),
        n_evaluated=len(paired),
    )


def check_margin(report: MarginReport, threshold: float) -> MarginReport:
    """Apply the tolerated-regression threshold; fails only, never wins."""
    if not 0.0 <= threshold <= 1.0:
        raise EvaluationError(f"margin threshold must be in [0, 1], got {threshold}")
    pct = report.regressed_fraction * 100.0
    if report.regressed_fraction > threshold:
        label = OutcomeLabel(
            Outcome.LOSS,
            f"{len(report.regressed_query_ids)} regressions = {pct:.4g}% > {threshold * 100:.4g}% tolerated",
        )
    else:
        label = OutcomeLabel(
            Outcome.TIE,
            f"{len(report.regressed_query_ids)} regressions = {pct:.4g}% <= {threshold * 100:.4g}% tolerated",
        )
    return replace(report, threshold=threshold, outcome=label)


def write_regressed_queries(report: MarginReport, path: str) -> None:
    """Export regressed qids one per line for manual triage."""
    with open(path, "w", encoding="utf-8") as handle:
        for qid in sorted(report.regressed_query_ids):
            handle.write(qid + "\n")
