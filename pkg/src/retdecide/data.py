"""Parsers for retrieval-experiment inputs.

All parsers read text streams (or paths), validate eagerly, and return
immutable dataset objects. Parsed objects are never mutated afterwards;
they are safe to share across threads.

Formats:

* run:        ``qid Q0 docid rank score runtag`` (whitespace separated)
* qrels:      ``qid 0 docid grade``
* queries:    ``qid<TAB>text``
* collection: ``docid<TAB>text``
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterator

from .errors import ParseError
from .tokenization import Tokenizer

RunEntry = tuple[str, float]  # (doc_id, score), rank = 1-based list position


@dataclass(frozen=True)
class RunFile:
    """One system's ranked results per query.

    Entries are sorted by descending score, ties broken by ascending
    doc_id, and ranks are the 1-based list positions. The rank column of
    the source file is ignored; run files in the wild carry inconsistent
    rank columns.
    """

    system_id: str
    entries: dict[str, list[RunEntry]]

    @property
    def query_ids(self) -> list[str]:
        return sorted(self.entries)

    def ranking(self, query_id: str) -> list[str]:
        """Ranked doc_ids for one query (empty if the query is absent)."""
        return [doc_id for doc_id, _ in self.entries.get(query_id, [])]


@dataclass(frozen=True)
class Qrels:
    """Graded relevance judgments keyed by (query_id, doc_id)."""

    judgments: dict[tuple[str, str], int]
    scale: str  # "binary" | "graded"
    max_grade: int

    def grades_for(self, query_id: str) -> dict[str, int]:
        return {doc: g for (qid, doc), g in self.judgments.items() if qid == query_id}

    @property
    def query_ids(self) -> set[str]:
        return {qid for qid, _ in self.judgments}


@dataclass(frozen=True)
class Query:
    query_id: str
    text: str
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class QuerySet:
    queries: dict[str, Query]

    def __contains__(self, query_id: str) -> bool:
        return query_id in self.queries

    def __len__(self) -> int:
        return len(self.queries)

    def tokens(self, query_id: str) -> tuple[str, ...]:
        return self.queries[query_id].tokens


@dataclass(frozen=True)
class TermStats:
    collection_frequency: int  # total occurrences across all docs
    document_frequency: int  # number of docs containing the term


@dataclass(frozen=True)
class Collection:
    docs: dict[str, tuple[str, ...]]
    term_stats: dict[str, TermStats] = field(repr=False)

    def __len__(self) -> int:
        return len(self.docs)


def _lines(stream: IO[bytes] | IO[str] | str | Path) -> tuple[str, Iterator[tuple[int, str]]]:
    """Normalize input to (source_name, iterator of (line_no, raw_line))."""
    if isinstance(stream, (str, Path)):
        name = str(stream)
        handle: IO[str] = open(stream, encoding="utf-8")
    elif isinstance(stream, io.TextIOBase):
        name = getattr(stream, "name", "<stream>")
        handle = stream
    else:  # byte stream
        name = getattr(stream, "name", "<stream>")
        handle = io.TextIOWrapper(stream, encoding="utf-8")

    def gen() -> Iterator[tuple[int, str]]:
        with handle:
            for i, raw in enumerate(handle, start=1):
                yield i, raw.rstrip("\n").rstrip("\r")

    return name, gen()


def parse_run(stream: IO[bytes] | IO[str] | str | Path, system_id: str | None = None) -> RunFile:
    """Parse a run file; ranks are rewritten from the score ordering.

    Ties in score are broken by ascending doc_id so ranks are
    deterministic across platforms and input orderings.
    """
    source, lines = _lines(stream)
    per_query: dict[str, list[RunEntry]] = {}
    seen: set[tuple[str, str]] = set()
    tag = system_id
    for line_no, line in lines:
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 6:
            raise ParseError(f"expected 6 fields 'qid Q0 docid rank score runtag', got {len(parts)}", source, line_no)
        qid, _q0, doc_id, _rank, score_str, runtag = parts
        try:
            score = float(score_str)
        except ValueError:
            raise ParseError(f"non-numeric score {score_str!r}", source, line_no) from None
        if (qid, doc_id) in seen:
            raise ParseError(f"duplicate (query, doc) pair ({qid}, {doc_id})", source, line_no)
        seen.add((qid, doc_id))
        if tag is None:
            tag = runtag
        per_query.setdefault(qid, []).append((doc_id, score))
    for qid, entries in per_query.items():
        entries.sort(key=lambda e: (-e[1], e[0]))
    return RunFile(system_id=tag or "run", entries=per_query)


def format_run(run: RunFile) -> str:
    """Serialize a RunFile back to the run exchange format (round-trips exactly)."""
    out: list[str] = []
    for qid in sorted(run.entries):
        for rank, (doc_id, score) in enumerate(run.entries[qid], start=1):
            out.append(f"{qid} Q0 {doc_id} {rank} {score!r} {run.system_id}")
    return "\n".join(out) + ("\n" if out else "")


def parse_qrels(stream: IO[bytes] | IO[str] | str | Path, scale: str | None = None) -> Qrels:
    """Parse qrels; grade scale is inferred unless overridden.

    Repeated identical lines are deduplicated; the same pair with
    conflicting grades is an error.
    """
    source, lines = _lines(stream)
    judgments: dict[tuple[str, str], int] = {}
    for line_no, line in lines:
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ParseError(f"expected 4 fields 'qid 0 docid grade', got {len(parts)}", source, line_no)
        qid, _zero, doc_id, grade_str = parts
        try:
            grade = int(grade_str)
        except ValueError:
            raise ParseError(f"non-integer grade {grade_str!r}", source, line_no) from None
        if grade < 0:
            raise ParseError(f"negative grade {grade} for ({qid}, {doc_id})", source, line_no)
        key = (qid, doc_id)
        if key in judgments and judgments[key] != grade:
            raise ParseError(
                f"conflicting grades for ({qid}, {doc_id}): {judgments[key]} vs {grade}", source, line_no
            )
        judgments[key] = grade
    max_grade = max(judgments.values(), default=0)
    inferred = "binary" if max_grade <= 1 else "graded"
    if scale is not None and scale not in ("binary", "graded"):
        raise ParseError(f"unknown grade scale {scale!r}", source)
    if scale == "binary" and max_grade > 1:
        raise ParseError(f"grade {max_grade} exceeds the declared binary scale", source)
    return Qrels(judgments=judgments, scale=scale or inferred, max_grade=max_grade)


def parse_queries(stream: IO[bytes] | IO[str] | str | Path, tokenizer: Tokenizer | None = None) -> QuerySet:
    """Parse a TSV query file and tokenize each query."""
    tok = tokenizer or Tokenizer()
    source, lines = _lines(stream)
    queries: dict[str, Query] = {}
    for line_no, line in lines:
        if not line.strip():
            continue
        if "\t" not in line:
            raise ParseError("expected 'qid<TAB>text'", source, line_no)
        qid, text = line.split("\t", 1)
        if not qid:
            raise ParseError("empty query id", source, line_no)
        if not text.strip():
            raise ParseError(f"empty text for query {qid!r}", source, line_no)
        if qid in queries:
            raise ParseError(f"duplicate query id {qid!r}", source, line_no)
        queries[qid] = Query(query_id=qid, text=text, tokens=tuple(tok.tokenize(text)))
    return QuerySet(queries=queries)


def parse_collection(stream: IO[bytes] | IO[str] | str | Path, tokenizer: Tokenizer | None = None) -> Collection:
    """Parse a TSV document collection and aggregate term statistics in one pass."""
    tok = tokenizer or Tokenizer()
    source, lines = _lines(stream)
    docs: dict[str, tuple[str, ...]] = {}
    cf: dict[str, int] = {}
    df: dict[str, int] = {}
    for line_no, line in lines:
        if not line.strip():
            continue
        if "\t" not in line:
            raise ParseError("expected 'docid<TAB>text'", source, line_no)
        doc_id, text = line.split("\t", 1)
        if doc_id in docs:
            raise ParseError(f"duplicate doc id {doc_id!r}", source, line_no)
        tokens = tuple(tok.tokenize(text))
        docs[doc_id] = tokens
        for token in tokens:
            cf[token] = cf.get(token, 0) + 1
        for token in set(tokens):
            df[token] = df.get(token, 0) + 1
    stats = {t: TermStats(collection_frequency=cf[t], document_frequency=df[t]) for t in cf}
    return Collection(docs=docs, term_stats=stats)


def write_scores_tsv(scores: dict[str, float], path: str | Path) -> None:
    """Export per-query scores as ``qid<TAB>score`` lines, sorted by qid."""
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(format_scores_tsv(scores))


def format_scores_tsv(scores: dict[str, float]) -> str:
    return "".join(f"{qid}\t{scores[qid]!r}\n" for qid in sorted(scores))
