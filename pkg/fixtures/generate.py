#!/usr/bin/env python3
"""Regenerate the shipped fixtures (deterministic; run from anywhere).

The workload is synthetic but structured: a 900-doc collection, 240
queries with controlled length/frequency mix, graded qrels, and three
runs — an incumbent ("bm25"-style placement), a stronger candidate
("tas"), and a flawed candidate ("tasflaw") that wins on average while
scoring zero on every query of token length >= 8. Cost tables mirror the
usual dense-retrieval story: slightly lower latency, much higher
indexing and storage cost.

After writing all files the script re-runs the decision pipeline on them
and asserts the intended outcomes (scenario1 deploys, scenario2 rejects
on efficiency, planted rejects on the long-query guardrail), so fixture
drift fails loudly here and not in CI.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent

N_QUERIES = 240
N_DOCS_FILLER = 560
RUN_DEPTH = 30

COMMON_VOCAB = [f"w{i:03d}" for i in range(250)]
OOD_VOCAB = [f"o{i:03d}" for i in range(40)]
ZED_VOCAB = [f"z{i:03d}" for i in range(20)]  # zero-overlap passages only

rng = random.Random(20240901)


def zipf_words(n: int, vocab: list[str]) -> list[str]:
    weights = [1.0 / (i + 1) for i in range(len(vocab))]
    return rng.choices(vocab, weights=weights, k=n)


def build_queries():
    """240 queries: ~90 short (2-4), ~100 medium (5-7), ~50 long (8-10)."""
    queries = {}
    kinds = {}
    qid = 0

    def add(tokens, kind):
        nonlocal qid
        name = f"q{qid:03d}"
        queries[name] = tokens
        kinds[name] = kind
        qid += 1
        return name

    # 60 queries drawn only from the 30 most frequent words ("common" bin)
    for _ in range(60):
        add(rng.sample(COMMON_VOCAB[:30], rng.randint(2, 4)), "short-common")
    # 30 more short queries with at least one rare word
    for _ in range(30):
        toks = zipf_words(rng.randint(1, 3), COMMON_VOCAB) + [rng.choice(COMMON_VOCAB[180:])]
        add(list(dict.fromkeys(toks)), "short")
    # 40 out-of-distribution queries (disjoint vocabulary from training)
    for i in range(40):
        take = rng.randint(3, 6)
        add(rng.sample(OOD_VOCAB, take), "ood")
    # 60 medium queries
    for _ in range(60):
        toks = list(dict.fromkeys(zipf_words(9, COMMON_VOCAB)))[: rng.randint(5, 7)]
        while len(toks) < 5:
            toks.append(rng.choice(COMMON_VOCAB))
        add(list(dict.fromkeys(toks))[:7], "medium")
    # 50 long queries (the planted failure dimension)
    for _ in range(50):
        toks = list(dict.fromkeys(zipf_words(14, COMMON_VOCAB)))
        while len(toks) < 8:
            toks.append(rng.choice(COMMON_VOCAB[50:]))
        add(toks[: rng.randint(8, 10)], "long")
    assert qid == N_QUERIES
    return queries, kinds


def main() -> None:
    queries, kinds = build_queries()

    # --- collection ------------------------------------------------------
    docs: dict[str, list[str]] = {}
    for i in range(N_DOCS_FILLER):
        length = rng.randint(12, 35)
        tokens = zipf_words(length, COMMON_VOCAB)
        if rng.random() < 0.1:  # sprinkle OOD words so they are in-corpus
            tokens += rng.sample(OOD_VOCAB, 2)
        docs[f"d{i:04d}"] = tokens
    for i, word_pool in enumerate([ZED_VOCAB] * 30):
        docs[f"zd{i:03d}"] = rng.sample(word_pool, rng.randint(6, 12)) + zipf_words(0, COMMON_VOCAB)

    # relevant docs per query: always contain (some) query tokens
    qrels: dict[str, dict[str, int]] = {}
    relevant_docs: dict[str, dict[str, int]] = {}
    for qid, tokens in queries.items():
        doc_hi = f"{qid}hi"
        docs[doc_hi] = list(tokens) + zipf_words(rng.randint(8, 18), COMMON_VOCAB)
        doc_mid = f"{qid}mid"
        docs[doc_mid] = list(tokens[: max(1, len(tokens) // 2)]) + zipf_words(rng.randint(10, 20), COMMON_VOCAB)
        lows = {}
        for j in range(2):
            doc_low = f"{qid}lo{j}"
            docs[doc_low] = [rng.choice(tokens)] + zipf_words(rng.randint(10, 20), COMMON_VOCAB)
            lows[doc_low] = 1
        grades = {doc_hi: 3, doc_mid: 2, **lows}
        zeros = rng.sample([d for d in docs if d.startswith("d")], 2)
        for z in zeros:
            grades.setdefault(z, 0)
        qrels[qid] = grades
        relevant_docs[qid] = {doc_hi: 3, doc_mid: 2, **lows}

    filler_ids = sorted(d for d in docs if d.startswith("d"))

    # --- planted structure ------------------------------------------------
    non_long = [q for q in queries if kinds[q] != "long"]
    lexical_semantic = rng.sample(non_long, 15)  # zero-overlap top-1 that is truly relevant
    remaining = [q for q in non_long if q not in lexical_semantic]
    lexical_spurious = rng.sample(remaining, 15)  # zero-overlap top-1 that is off-topic
    flip_query = rng.choice([q for q in remaining if q not in lexical_spurious and kinds[q] == "medium"])

    for i, qid in enumerate(lexical_semantic):
        zdoc = f"zd{i:03d}"
        qrels[qid][zdoc] = 3  # judged relevant despite no token overlap
    for i, qid in enumerate(lexical_spurious):
        zdoc = f"zd{i + 15:03d}"
        qrels[qid].setdefault(zdoc, 0)

    def fill_ranking(placed: dict[str, int], qid: str) -> list[str]:
        """Place docs at requested 1-based ranks, pad with filler to RUN_DEPTH."""
        taken = set(placed)
        pool = [d for d in rng.sample(filler_ids, RUN_DEPTH + 8) if d not in taken]
        ranking: list[str | None] = [None] * RUN_DEPTH
        for doc, rank in placed.items():
            if 1 <= rank <= RUN_DEPTH and ranking[rank - 1] is None:
                ranking[rank - 1] = doc
        it = iter(pool)
        return [slot if slot is not None else next(it) for slot in ranking]

    incumbent_run: dict[str, list[str]] = {}
    candidate_run: dict[str, list[str]] = {}
    flawed_run: dict[str, list[str]] = {}

    for qid, rel in relevant_docs.items():
        doc_hi = f"{qid}hi"
        doc_mid = f"{qid}mid"
        lows = [d for d in rel if d.endswith(("lo0", "lo1"))]

        # incumbent: decent but noisy placement
        r_hi = rng.choices([1, 2, 3, 4, 6, 9, 14], weights=[24, 18, 14, 10, 12, 12, 10])[0]
        placed_a = {doc_hi: r_hi, doc_mid: r_hi + rng.randint(1, 4)}
        for j, d in enumerate(lows):
            placed_a[d] = r_hi + 5 + 4 * j + rng.randint(0, 3)
        incumbent_run[qid] = fill_ranking(placed_a, qid)

        # candidate: visibly better placement
        r_hi_b = rng.choices([1, 1, 1, 2, 3], weights=[55, 15, 10, 12, 8])[0]
        placed_b = {doc_hi: r_hi_b, doc_mid: r_hi_b + rng.randint(1, 2)}
        for j, d in enumerate(lows):
            placed_b[d] = r_hi_b + 3 + 3 * j + rng.randint(0, 2)
        candidate_run[qid] = fill_ranking(placed_b, qid)

    for i, qid in enumerate(lexical_semantic):
        top = [f"zd{i:03d}"] + [d for d in candidate_run[qid] if d != f"zd{i:03d}"]
        candidate_run[qid] = top[:RUN_DEPTH]
    for i, qid in enumerate(lexical_spurious):
        zdoc = f"zd{i + 15:03d}"
        rest = [d for d in candidate_run[qid] if d != zdoc]
        # off-topic top passage; the graded docs shift one rank down
        candidate_run[qid] = ([zdoc] + rest)[:RUN_DEPTH]

    # one maximal per-query regression: incumbent solves it, candidate
    # pushes every grade>=2 doc below the RR cutoff
    incumbent_run[flip_query] = fill_ranking({f"{flip_query}hi": 1, f"{flip_query}mid": 3}, flip_query)
    graded_out = {f"{flip_query}hi": 15, f"{flip_query}mid": 18, f"{flip_query}lo0": 5, f"{flip_query}lo1": 7}
    candidate_run[flip_query] = fill_ranking(graded_out, flip_query)

    # flawed candidate: dominant on short/medium, zero on long queries
    for qid, rel in relevant_docs.items():
        if kinds[qid] == "long":
            graded = set(qrels[qid])
            pool = [d for d in filler_ids if d not in graded]
            flawed_run[qid] = rng.sample(pool, RUN_DEPTH)
        else:
            placed = {f"{qid}hi": 1, f"{qid}mid": 2, f"{qid}lo0": 4, f"{qid}lo1": 6}
            flawed_run[qid] = fill_ranking(placed, qid)

    # --- write files -------------------------------------------------------
    def write_run(path: Path, tag: str, rankings: dict[str, list[str]]) -> None:
        with path.open("w", encoding="utf-8") as fh:
            for qid in sorted(rankings):
                for rank, doc in enumerate(rankings[qid], start=1):
                    fh.write(f"{qid} Q0 {doc} {rank} {float(RUN_DEPTH - rank + 1)!r} {tag}\n")

    with (OUT / "queries.tsv").open("w", encoding="utf-8") as fh:
        for qid in sorted(queries):
            fh.write(f"{qid}\t{' '.join(queries[qid])}\n")
    with (OUT / "collection.tsv").open("w", encoding="utf-8") as fh:
        for doc_id in sorted(docs):
            fh.write(f"{doc_id}\t{' '.join(docs[doc_id])}\n")
    with (OUT / "qrels.txt").open("w", encoding="utf-8") as fh:
        for qid in sorted(qrels):
            for doc_id in sorted(qrels[qid]):
                fh.write(f"{qid} 0 {doc_id} {qrels[qid][doc_id]}\n")
    # training queries: common vocabulary only, so the OOD slice is exactly
    # the o-vocabulary queries
    with (OUT / "train_queries.tsv").open("w", encoding="utf-8") as fh:
        for i in range(200):
            toks = list(dict.fromkeys(zipf_words(rng.randint(2, 8), COMMON_VOCAB)))
            fh.write(f"t{i:03d}\t{' '.join(toks)}\n")

    write_run(OUT / "bm25.run", "bm25", incumbent_run)
    write_run(OUT / "tas.run", "tas", candidate_run)
    write_run(OUT / "tasflaw.run", "tasflaw", flawed_run)

    costs = {
        "schema_version": 1,
        "systems": {
            "bm25": {
                "latency": {"value": 5.0, "unit": "ms"},
                "indexing": {"value": 11.0, "unit": "min"},
                "storage": {"value": 2.3, "unit": "gb"},
            },
            "tas": {
                "latency": {"value": 4.0, "unit": "ms"},
                "indexing": {"value": 110.0, "unit": "min"},
                "storage": {"value": 9.2, "unit": "gb"},
            },
            "tasflaw": {
                "latency": {"value": 4.0, "unit": "ms"},
                "indexing": {"value": 110.0, "unit": "min"},
                "storage": {"value": 9.2, "unit": "gb"},
            },
        },
    }
    (OUT / "costs.json").write_text(json.dumps(costs, indent=2) + "\n", encoding="utf-8")

    guardrail_criteria = [
        {"id": "C-Length-short", "kind": "secondary", "type": "length", "m": 0, "n": 5},
        {"id": "C-Length-medium", "kind": "secondary", "type": "length", "m": 4, "n": 8},
        {"id": "C-Length-long", "kind": "secondary", "type": "length", "m": 7, "n": "inf"},
        {"id": "C-Frequency-rare", "kind": "secondary", "type": "frequency", "m": -1, "n": 60},
        {"id": "C-Frequency-common", "kind": "secondary", "type": "frequency", "m": 59, "n": "inf"},
        {"id": "C-Lexical", "kind": "secondary", "type": "lexical", "max_overlap": 0, "depth": 1},
        {
            "id": "C-Memory",
            "kind": "secondary",
            "type": "out_of_distribution",
            "epsilon": 0.7,
            "train_queries": "train_queries.tsv",
        },
        {"id": "C-Margin", "kind": "secondary", "type": "margin", "delta": 1.0, "threshold": 0.01, "metric": "mrr@10"},
    ]
    notes = {
        "C-Bias": "No demographic slices available for this synthetic workload; rerun with production traffic before launch.",
        "C-Environment": "Vectorization energy cost not measured here; indexing minutes are the only proxy.",
        "C-Maintainability": "Candidate needs periodic re-encoding of refreshed documents; budget for re-index cycles.",
    }

    scenario1 = {
        "schema_version": 1,
        "incumbent": "bm25",
        "candidates": ["tas"],
        "metric": "ndcg@10",
        "alpha": 0.05,
        "practical_margin": 0.01,
        "min_slice_size": 20,
        "weight_preset": "latency-focus",
        "lambda": 0.001,
        "cost_cap": {"mode": "none"},
        "criteria": [
            {"id": "C-Effective", "kind": "primary", "type": "effectiveness"},
            {"id": "C-Efficient", "kind": "primary", "type": "efficiency", "target": "aggregated", "factor_cap": 3.0},
            *guardrail_criteria,
        ],
        "qualitative_notes": notes,
    }
    scenario2 = dict(
        scenario1,
        **{
            "lambda": 0.02,
            "cost_cap": {"mode": "anchor"},
            "criteria": [
                {"id": "C-Effective", "kind": "primary", "type": "effectiveness"},
                {"id": "C-Efficient", "kind": "primary", "type": "efficiency", "target": "aggregated", "factor_cap": 1.0},
                *guardrail_criteria,
            ],
        },
    )
    planted = dict(scenario1, candidates=["tasflaw"])

    (OUT / "scenario1.json").write_text(json.dumps(scenario1, indent=2) + "\n", encoding="utf-8")
    (OUT / "scenario2.json").write_text(json.dumps(scenario2, indent=2) + "\n", encoding="utf-8")
    (OUT / "planted.json").write_text(json.dumps(planted, indent=2) + "\n", encoding="utf-8")

    verify()


def verify() -> None:
    """Re-run the pipeline on the written files and assert the intended story."""
    from retdecide import DecisionInputs, parse_collection, parse_config, parse_costs, parse_qrels, parse_queries, parse_run
    from retdecide.workflow import run_decision

    config1 = parse_config(OUT / "scenario1.json")
    shared = dict(
        qrels=parse_qrels(OUT / "qrels.txt"),
        costs=parse_costs(OUT / "costs.json"),
        queries=parse_queries(OUT / "queries.tsv", config1.tokenizer),
        collection=parse_collection(OUT / "collection.tsv", config1.tokenizer),
    )
    runs = {name: parse_run(OUT / f"{name}.run", system_id=name) for name in ("bm25", "tas", "tasflaw")}

    b1 = run_decision(DecisionInputs(config=config1, runs={k: runs[k] for k in ("bm25", "tas")}, **shared))
    assert b1["verdicts"][0]["decision"] == "deploy", b1["verdicts"]
    for record in b1["criteria"]:
        assert record["outcome"]["label"] != "loss", record
    sizes = {
        r["id"]: r["evidence"]["guardrail"]["slice_size"] for r in b1["criteria"] if "guardrail" in r["evidence"]
    }
    assert all(size >= 20 for size in sizes.values()), sizes
    margin = next(r for r in b1["criteria"] if r["id"] == "C-Margin")
    assert margin["evidence"]["margin"]["regressed_count"] == 1, margin

    config2 = parse_config(OUT / "scenario2.json")
    b2 = run_decision(DecisionInputs(config=config2, runs={k: runs[k] for k in ("bm25", "tas")}, **shared))
    assert b2["verdicts"][0]["decision"] == "reject"
    assert any("C-Efficient" in reason for reason in b2["verdicts"][0]["reasons"])

    config3 = parse_config(OUT / "planted.json")
    b3 = run_decision(DecisionInputs(config=config3, runs={k: runs[k] for k in ("bm25", "tasflaw")}, **shared))
    assert b3["verdicts"][0]["decision"] == "reject"
    effective = next(r for r in b3["criteria"] if r["id"] == "C-Effective")
    assert effective["outcome"]["label"] == "win", effective
    long_bin = next(r for r in b3["criteria"] if r["id"] == "C-Length-long")
    assert long_bin["outcome"]["label"] == "loss", long_bin

    print("fixtures verified:")
    print(f"  scenario1 deploy, guardrail slice sizes {sizes}")
    print(f"  scenario2 reject: {b2['verdicts'][0]['reasons'][0]}")
    print(f"  planted reject: C-Length-long loss, C-Effective still a win")


if __name__ == "__main__":
    main()
