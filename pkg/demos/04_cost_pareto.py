#!/usr/bin/env python3
"""Cost aggregation, weight presets, Pareto frontiers, and decision lines.

Cost factors live on different scales (milliseconds, minutes, gigabytes),
so each factor is divided by the incumbent's value and weighted before
summing. The incumbent's own aggregated cost is always exactly the sum
of the weights, which makes caps like "no cost increase" easy to state.
"""

from pathlib import Path

from retdecide import (
    WEIGHT_PRESETS,
    MetricSpec,
    SystemPoint,
    aggregate_cost,
    apply_cost_cap,
    evaluate,
    mean_score,
    parse_costs,
    parse_qrels,
    parse_run,
    pareto_frontier,
    utility_rank,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def ndcg_means() -> dict[str, float]:
    qrels = parse_qrels(FIXTURES / "qrels.txt")
    spec = MetricSpec.parse("ndcg@10")
    return {
        sid: mean_score(evaluate(parse_run(FIXTURES / f"{sid}.run"), qrels, spec)).mean
        for sid in ("bm25", "tas")
    }


def main() -> None:
    effectiveness = ndcg_means()
    table = parse_costs(FIXTURES / "costs.json")
    anchor = table.factors("bm25")
    print("raw cost factors:")
    for sid in ("bm25", "tas"):
        print(f"  {sid}: {table.factors(sid)}")

    print("\naggregated cost under each weight preset (anchor = bm25):")
    for preset, weights in WEIGHT_PRESETS.items():
        row = []
        for sid in ("bm25", "tas"):
            ac = aggregate_cost(table.factors(sid), anchor, weights, sid, "bm25")
            row.append(f"{sid}={ac.value:.2f}")
        print(f"  {preset:<18} {'  '.join(row)}   (weights {weights})")

    weights = WEIGHT_PRESETS["latency-focus"]
    points = [
        SystemPoint(sid, effectiveness[sid], cost_vector=table.factors(sid),
                    aggregated_cost=aggregate_cost(table.factors(sid), anchor, weights, sid, "bm25").value)
        for sid in ("bm25", "tas")
    ]
    result = pareto_frontier(points)
    print(f"\nfrontier under latency-focus weights: {list(result.frontier)}")

    print("\ndecision lines (utility = effectiveness - lambda * cost):")
    for lam in (0.0, 0.001, 0.02):
        ranking = utility_rank(points, lam)
        print(f"  lambda={lam:<6} ranking: " + "  ".join(f"{sid} (U={u:.3f})" for sid, u in ranking))

    capped = apply_cost_cap(points, cap=12.0)  # anchor's own aggregated cost
    print(f"\nwith a hard cap at the anchor's cost (12.0): {[p.system_id for p in capped]} remain")


if __name__ == "__main__":
    main()
