"""Query-slice construction for robustness guardrails.

Slices select query subsets by token length, minimum term frequency,
lexical overlap with a system's top-ranked passages, distance to a
training query set, or an explicit id list. All selectors except the
lexical one are independent of any retrieval system; the selector
provenance records rule, parameters, and source system so every slice is
reconstructable from its inputs.

Length and frequency bounds are strict on both sides (m < value < n);
the CLI bin helpers map half-open bins onto these open intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import IO, Callable, Iterable

from .data import Collection, QuerySet, RunFile, _lines
from .errors import EvaluationError, ParseError


@dataclass(frozen=True)
class QuerySlice:
    name: str
    query_ids: frozenset[str]
    selector: dict
    system_independent: bool
    warnings: tuple[str, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.query_ids)

    def __contains__(self, query_id: str) -> bool:
        return query_id in self.query_ids


def _check_bounds(m: float, n: float) -> None:
    if m >= n:
        raise EvaluationError(f"slice bounds must satisfy m < n, got m={m}, n={n}")


def slice_by_length(queries: QuerySet, m: float, n: float, name: str | None = None) -> QuerySlice:
    """Queries whose token length lies strictly between m and n."""
    _check_bounds(m, n)
    ids = frozenset(qid for qid, q in queries.queries.items() if m < len(q.tokens) < n)
    return QuerySlice(
        name=name or f"length({m},{n})",
        query_ids=ids,
        selector={"rule": "length", "m": m, "n": n},
        system_independent=True,
    )


def slice_by_min_frequency(
    queries: QuerySet,
    collection: Collection,
    m: float,
    n: float,
    statistic: str = "collection_frequency",
    name: str | None = None,
) -> QuerySlice:
    """Queries whose rarest token's corpus frequency lies strictly between m and n.

    Tokens absent from the collection count as frequency 0. Queries with
    an empty token list cannot be ranked by rarity and are excluded with
    a warning.
    """
    _check_bounds(m, n)
    if statistic not in ("collection_frequency", "document_frequency"):
        raise EvaluationError(f"unknown frequency statistic {statistic!r}")
    ids = set()
    warnings = []
    for qid, q in queries.queries.items():
        if not q.tokens:
            warnings.append(f"query {qid} has no tokens; excluded")
            continue
        min_tf = min(
            getattr(collection.term_stats[t], statistic) if t in collection.term_stats else 0 for t in q.tokens
        )
        if m < min_tf < n:
            ids.add(qid)
    return QuerySlice(
        name=name or f"min_frequency({m},{n})",
        query_ids=frozenset(ids),
        selector={"rule": "min_frequency", "m": m, "n": n, "statistic": statistic},
        system_independent=True,
        warnings=tuple(warnings),
    )


def slice_by_lexical_overlap(
    run: RunFile,
    queries: QuerySet,
    collection: Collection,
    max_overlap: int,
    depth: int = 1,
    name: str | None = None,
) -> QuerySlice:
    """Queries whose passages ranked at positions <= depth all share at most
    max_overlap unique tokens with the query.

    Overlap is set intersection of unique tokens (multiplicity ignored).
    This selector reads a run, so it is system-derived: the source system
    is recorded and the slice must not be reused to compare that system
    against another on equal footing without noting it.
    """
    if max_overlap < 0:
        raise EvaluationError(f"max_overlap must be >= 0, got {max_overlap}")
    if depth < 1:
        raise EvaluationError(f"depth must be >= 1, got {depth}")
    ids = set()
    warnings = []
    for qid, q in queries.queries.items():
        top = run.entries.get(qid)
        if not top:
            warnings.append(f"query {qid} has no run entries; excluded")
            continue
        q_tokens = set(q.tokens)
        selected = True
        for doc_id, _score in top[:depth]:
            if doc_id not in collection.docs:
                raise EvaluationError(f"doc {doc_id!r} (ranked for query {qid}) missing from collection")
            if len(q_tokens & set(collection.docs[doc_id])) > max_overlap:
                selected = False
                break
        if selected:
            ids.add(qid)
    return QuerySlice(
        name=name or f"lexical_overlap(<={max_overlap}, depth={depth})",
        query_ids=frozenset(ids),
        selector={
            "rule": "lexical_overlap",
            "max_overlap": max_overlap,
            "depth": depth,
            "source_system": run.system_id,
        },
        system_independent=False,
        warnings=tuple(warnings),
    )


def jaccard_distance(tokens_a: Iterable[str], tokens_b: Iterable[str]) -> float:
    """1 - Jaccard similarity of the two token sets; 0 distance for two empty sets."""
    sa, sb = set(tokens_a), set(tokens_b)
    union = sa | sb
    if not union:
        return 0.0
    return 1.0 - len(sa & sb) / len(union)


def slice_out_of_distribution(
    eval_queries: QuerySet,
    train_queries: QuerySet,
    epsilon: float,
    distance: Callable[[Iterable[str], Iterable[str]], float] = jaccard_distance,
    name: str | None = None,
) -> QuerySlice:
    """Evaluation queries whose nearest training query is farther than epsilon.

    The per-pair dissimilarity is aggregated over the training set by
    minimum, so a query is selected only when *no* training query is
    within epsilon.
    """
    if not train_queries.queries:
        raise EvaluationError("empty training query set")
    train_tokens = [set(q.tokens) for q in train_queries.queries.values()]
    ids = set()
    for qid, q in eval_queries.queries.items():
        nearest = min(distance(q.tokens, t) for t in train_tokens)
        if nearest > epsilon:
            ids.add(qid)
    return QuerySlice(
        name=name or f"out_of_distribution(>{epsilon})",
        query_ids=frozenset(ids),
        selector={"rule": "out_of_distribution", "epsilon": epsilon, "train_size": len(train_queries)},
        system_independent=True,
    )


def slice_from_file(stream: IO[bytes] | IO[str] | str, queries: QuerySet, name: str | None = None) -> QuerySlice:
    """Slice from an external qid-per-line list, intersected with the query set.

    Ids absent from the query set are reported as warnings, not errors,
    so externally curated hard-query lists can span multiple workloads.
    """
    source, lines = _lines(stream)
    listed: list[str] = []
    for _line_no, line in lines:
        qid = line.strip()
        if qid:
            listed.append(qid)
    known = frozenset(qid for qid in listed if qid in queries)
    unknown = sorted(set(listed) - set(known))
    if not known:
        raise ParseError("no listed query id matches the query set", source)
    warnings = tuple(f"unknown query id {qid}" for qid in unknown)
    return QuerySlice(
        name=name or f"file({source})",
        query_ids=known,
        selector={"rule": "file", "source": source, "listed": len(listed), "unknown": len(unknown)},
        system_independent=True,
        warnings=warnings,
    )


def length_bins(edges: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Validate a list of (m, n) open-interval bin edges."""
    for m, n in edges:
        _check_bounds(m, n)
    return edges


def parse_bins(text: str) -> list[tuple[float, float]]:
    """Parse ``m:n,m:n,...`` bin edges; ``inf`` allowed as upper edge."""
    bins: list[tuple[float, float]] = []
    for part in text.split(","):
        m_str, _, n_str = part.partition(":")
        if not _:
            raise EvaluationError(f"bin {part!r} must be 'm:n'")
        try:
            m = float(m_str)
            n = math.inf if n_str.lower() in ("inf", "") else float(n_str)
        except ValueError:
            raise EvaluationError(f"bin {part!r} has non-numeric edges") from None
        _check_bounds(m, n)
        bins.append((m, n))
    return bins


def write_slice(slice_: QuerySlice, path: str) -> None:
    """Export a slice as a qid-per-line file (sorted, re-importable)."""
    with open(path, "w", encoding="utf-8") as handle:
        for qid in sorted(slice_.query_ids):
            handle.write(qid + "\n")
