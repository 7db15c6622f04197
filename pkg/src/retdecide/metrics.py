"""Rank-cutoff effectiveness metrics for runs against qrels.

Conventions (TREC-DL family):

* NDCG gain is ``2^grade - 1`` with ``log2(rank + 1)`` discount.
* RR / recall / precision binarize graded judgments at a threshold
  (default: grade >= 2 on graded qrels, >= 1 on binary qrels).
* Queries with no judged-relevant document are *skipped*, not scored 0,
  and excluded from means; skipped counts are always reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .data import Qrels, RunFile
from .errors import EvaluationError

METRIC_KINDS = ("ndcg", "rr", "recall", "precision")


@dataclass(frozen=True)
class MetricSpec:
    kind: str
    cutoff: int
    binarization_threshold: int | None = None  # None = derive from qrels scale

    def __post_init__(self) -> None:
        if self.kind not in METRIC_KINDS:
            raise EvaluationError(f"unknown metric kind {self.kind!r} (expected one of {METRIC_KINDS})")
        if self.cutoff < 1:
            raise EvaluationError(f"metric cutoff must be >= 1, got {self.cutoff}")

    @property
    def name(self) -> str:
        kind = "mrr" if self.kind == "rr" else self.kind
        return f"{kind}@{self.cutoff}"

    @staticmethod
    def parse(text: str) -> "MetricSpec":
        """Parse strings like ``ndcg@10``, ``mrr@10``, ``recall@100``, ``p@1``."""
        name, _, cutoff = text.lower().partition("@")
        if not cutoff:
            raise EvaluationError(f"metric {text!r} must be '<kind>@<k>'")
        aliases = {"mrr": "rr", "rr": "rr", "p": "precision"}
        kind = aliases.get(name, name)
        try:
            k = int(cutoff)
        except ValueError:
            raise EvaluationError(f"metric cutoff {cutoff!r} is not an integer") from None
        return MetricSpec(kind=kind, cutoff=k)


@dataclass(frozen=True)
class PerQueryScores:
    """Per-query scores of one run under one metric."""

    system_id: str
    metric: MetricSpec
    scores: dict[str, float]
    skipped: frozenset[str] = field(default_factory=frozenset)


@dataclass(frozen=True)
class MeanResult:
    mean: float
    n: int
    skipped: int


def _log2(x: float) -> float:
    return math.log2(x)


def ndcg_at_k(ranking: list[str], grades: Mapping[str, int], k: int) -> float | None:
    """NDCG@k; None when the query has no positively graded document (skip)."""
    if k < 1:
        raise EvaluationError(f"k must be >= 1, got {k}")
    ideal = sorted(grades.values(), reverse=True)[:k]
    idcg = sum((2**g - 1) / _log2(i + 1) for i, g in enumerate(ideal, start=1))
    if idcg == 0:
        return None
    dcg = 0.0
    for i, doc_id in enumerate(ranking[:k], start=1):
        g = grades.get(doc_id, 0)
        if g > 0:
            dcg += (2**g - 1) / _log2(i + 1)
    return dcg / idcg


def rr_at_k(ranking: list[str], grades: Mapping[str, int], k: int, threshold: int) -> float | None:
    """Reciprocal rank of the first doc with grade >= threshold in the top k."""
    if k < 1:
        raise EvaluationError(f"k must be >= 1, got {k}")
    if not any(g >= threshold for g in grades.values()):
        return None
    for i, doc_id in enumerate(ranking[:k], start=1):
        if grades.get(doc_id, 0) >= threshold:
            return 1.0 / i
    return 0.0


def recall_at_k(ranking: list[str], grades: Mapping[str, int], k: int, threshold: int) -> float | None:
    if k < 1:
        raise EvaluationError(f"k must be >= 1, got {k}")
    relevant = {doc for doc, g in grades.items() if g >= threshold}
    if not relevant:
        return None
    hits = sum(1 for doc_id in ranking[:k] if doc_id in relevant)
    return hits / len(relevant)


def precision_at_k(ranking: list[str], grades: Mapping[str, int], k: int, threshold: int) -> float | None:
    if k < 1:
        raise EvaluationError(f"k must be >= 1, got {k}")
    relevant = {doc for doc, g in grades.items() if g >= threshold}
    if not relevant:
        return None
    hits = sum(1 for doc_id in ranking[:k] if doc_id in relevant)
    return hits / k


def default_threshold(qrels: Qrels) -> int:
    """TREC-DL convention: binarize graded qrels at grade 2, binary at 1."""
    return 1 if qrels.scale == "binary" else 2


def evaluate(run: RunFile, qrels: Qrels, spec: MetricSpec) -> PerQueryScores:
    """Score every query of the run; queries without judged-relevant docs are skipped."""
    threshold = spec.binarization_threshold
    if threshold is None:
        threshold = default_threshold(qrels)
    by_query: dict[str, dict[str, int]] = {}
    for (qid, doc_id), grade in qrels.judgments.items():
        by_query.setdefault(qid, {})[doc_id] = grade

    scores: dict[str, float] = {}
    skipped: set[str] = set()
    for qid in run.entries:
        grades = by_query.get(qid, {})
        ranking = run.ranking(qid)
        if spec.kind == "ndcg":
            value = ndcg_at_k(ranking, grades, spec.cutoff)
        elif spec.kind == "rr":
            value = rr_at_k(ranking, grades, spec.cutoff, threshold)
        elif spec.kind == "recall":
            value = recall_at_k(ranking, grades, spec.cutoff, threshold)
        else:
            value = precision_at_k(ranking, grades, spec.cutoff, threshold)
        if value is None:
            skipped.add(qid)
        else:
            scores[qid] = value
    return PerQueryScores(system_id=run.system_id, metric=spec, scores=scores, skipped=frozenset(skipped))


def mean_score(per_query: PerQueryScores, over: Iterable[str] | None = None) -> MeanResult:
    """Arithmetic mean over non-skipped queries, optionally restricted to a slice."""
    if over is None:
        selected = sorted(per_query.scores)
        skipped = len(per_query.skipped)
    else:
        slice_ids = set(over)
        selected = sorted(q for q in per_query.scores if q in slice_ids)
        skipped = len(slice_ids & per_query.skipped)
    if not selected:
        raise EvaluationError("empty evaluation set")
    total = math.fsum(per_query.scores[q] for q in selected)
    return MeanResult(mean=total / len(selected), n=len(selected), skipped=skipped)
