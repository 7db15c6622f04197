#!/usr/bin/env python3
"""Score retrieval runs against relevance judgments.

Parses the shipped example runs and qrels, evaluates a few standard
rank-cutoff metrics, and shows how queries without judged-relevant
documents are skipped rather than scored zero.
"""

from pathlib import Path

from retdecide import MetricSpec, evaluate, mean_score, parse_qrels, parse_run

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def main() -> None:
    qrels = parse_qrels(FIXTURES / "qrels.txt")
    print(f"qrels: {len(qrels.judgments)} judgments, scale={qrels.scale} (max grade {qrels.max_grade})")

    for name in ("bm25", "tas"):
        run = parse_run(FIXTURES / f"{name}.run")
        print(f"\n{run.system_id}: {len(run.entries)} queries")
        for metric_text in ("ndcg@10", "mrr@10", "recall@30", "p@1"):
            spec = MetricSpec.parse(metric_text)
            scores = evaluate(run, qrels, spec)
            result = mean_score(scores)
            print(f"  {spec.name:<11} mean={result.mean:.4f}  over {result.n} queries ({result.skipped} skipped)")

    # per-query values are plain dicts, easy to export or inspect
    run = parse_run(FIXTURES / "tas.run")
    scores = evaluate(run, qrels, MetricSpec.parse("ndcg@10"))
    worst = sorted(scores.scores, key=scores.scores.get)[:5]
    print("\nfive weakest tas queries by ndcg@10:")
    for qid in worst:
        print(f"  {qid}: {scores.scores[qid]:.4f}")


if __name__ == "__main__":
    main()
