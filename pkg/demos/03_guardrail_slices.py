#!/usr/bin/env python3
"""Robustness guardrails: a better mean can hide a broken query subset.

Slices the query set by token length, rarest-term frequency, lexical
overlap of the candidate's top passage, and distance to a training set,
then checks each slice for a statistically significant loss. Also runs
the per-query margin rule that counts total-flip regressions.

The 'tasflaw' run demonstrates the failure mode: it beats the incumbent
on average while scoring zero on every query of length >= 8.
"""

from pathlib import Path

from retdecide import (
    MetricSpec,
    check_margin,
    evaluate,
    margin_regressions,
    mean_score,
    parse_collection,
    parse_qrels,
    parse_queries,
    parse_run,
    run_guardrail,
    slice_by_length,
    slice_by_lexical_overlap,
    slice_by_min_frequency,
    slice_out_of_distribution,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def main() -> None:
    qrels = parse_qrels(FIXTURES / "qrels.txt")
    queries = parse_queries(FIXTURES / "queries.tsv")
    collection = parse_collection(FIXTURES / "collection.tsv")
    spec = MetricSpec.parse("ndcg@10")
    base_run = parse_run(FIXTURES / "bm25.run")
    base = evaluate(base_run, qrels, spec)

    for name in ("tas", "tasflaw"):
        cand_run = parse_run(FIXTURES / f"{name}.run")
        cand = evaluate(cand_run, qrels, spec)
        print(f"=== {name} (mean {mean_score(base).mean:.4f} -> {mean_score(cand).mean:.4f}) ===")

        slices = [
            slice_by_length(queries, 0, 5, name="length 1-4"),
            slice_by_length(queries, 4, 8, name="length 5-7"),
            slice_by_length(queries, 7, float("inf"), name="length 8+"),
            slice_by_min_frequency(queries, collection, -1, 60, name="rarest term < 60"),
            slice_by_lexical_overlap(cand_run, queries, collection, 0, 1, name="no top-1 overlap"),
            slice_out_of_distribution(queries, parse_queries(FIXTURES / "train_queries.tsv"), 0.7,
                                      name="far from training"),
        ]
        for s in slices:
            report = run_guardrail(s.name, s, base, cand)
            c = report.comparison
            detail = f"{c.mean_a:.3f} -> {c.mean_b:.3f}, p={c.p_value:.2g}" if c else "n/a"
            print(f"  {report.outcome.symbol}  {s.name:<22} n={report.slice_size:<4} {detail}")

        # margin rule on MRR@10: how many queries flip from solved to unsolved?
        rr = MetricSpec.parse("mrr@10")
        margin = check_margin(
            margin_regressions(evaluate(base_run, qrels, rr), evaluate(cand_run, qrels, rr), delta=1.0),
            threshold=0.01,
        )
        print(f"  {margin.outcome.symbol}  total flips            "
              f"{len(margin.regressed_query_ids)}/{margin.n_evaluated} = {margin.regressed_fraction:.2%}"
              f" (tolerated 1%)")
        print()


if __name__ == "__main__":
    main()
