#!/usr/bin/env python3
"""Statistical vs practical significance when comparing two systems.

A candidate must clear two bars at once: a two-tailed paired t-test below
alpha, and a mean improvement at least as large as the practical margin.
A significant-but-tiny gain therefore classifies as a tie.
"""

from pathlib import Path

from retdecide import MetricSpec, compare, evaluate, parse_qrels, parse_run

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def main() -> None:
    qrels = parse_qrels(FIXTURES / "qrels.txt")
    spec = MetricSpec.parse("ndcg@10")
    baseline = evaluate(parse_run(FIXTURES / "bm25.run"), qrels, spec)
    candidate = evaluate(parse_run(FIXTURES / "tas.run"), qrels, spec)

    result = compare(baseline, candidate, alpha=0.05, practical_margin=0.01)
    print(f"candidate vs incumbent on {spec.name} over {result.n} paired queries")
    print(f"  means: {result.mean_a:.4f} -> {result.mean_b:.4f}  (delta {result.practical_delta:+.4f})")
    print(f"  t = {result.t_statistic:.3f}, p = {result.p_value:.3g}")
    print(f"  outcome: {result.outcome.symbol}  ({result.outcome.note})")

    # raising the practical margin turns the same evidence into a tie:
    # statistically real but too small to be worth a migration
    strict = compare(baseline, candidate, alpha=0.05, practical_margin=0.2)
    print(f"\nwith a 0.2 practical margin: {strict.outcome.symbol}  ({strict.outcome.note})")

    # reversing the roles flips the sign but not the p-value
    swapped = compare(candidate, baseline, alpha=0.05, practical_margin=0.01)
    print(f"swapped arguments: {swapped.outcome.symbol}, same p = {swapped.p_value:.3g}")


if __name__ == "__main__":
    main()
