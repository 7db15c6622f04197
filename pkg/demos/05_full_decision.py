#!/usr/bin/env python3
"""The full two-rule decision procedure, end to end.

Two decision makers look at the same evidence:

* scenario1 tolerates extra cost for effectiveness (shallow decision
  line, generous efficiency cap) and deploys the candidate;
* scenario2 allows no cost increase at all (cap at the incumbent's
  aggregated cost) and rejects it on the efficiency criterion.

Equivalent CLI:
  retdecide decide --config fixtures/scenario1.json \
      --run bm25=fixtures/bm25.run --run tas=fixtures/tas.run \
      --qrels fixtures/qrels.txt --costs fixtures/costs.json \
      --queries fixtures/queries.tsv --collection fixtures/collection.tsv \
      --out bundle.json --report report.md
Then explore interactively:  retdecide serve --bundle bundle.json --ui-dir frontend/dist
"""

from pathlib import Path

from retdecide import (
    DecisionInputs,
    parse_collection,
    parse_config,
    parse_costs,
    parse_qrels,
    parse_queries,
    parse_run,
    render_report,
    run_decision,
    write_bundle,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def main() -> None:
    config1 = parse_config(FIXTURES / "scenario1.json")
    shared = dict(
        qrels=parse_qrels(FIXTURES / "qrels.txt"),
        costs=parse_costs(FIXTURES / "costs.json"),
        queries=parse_queries(FIXTURES / "queries.tsv", config1.tokenizer),
        collection=parse_collection(FIXTURES / "collection.tsv", config1.tokenizer),
    )
    runs = {name: parse_run(FIXTURES / f"{name}.run", system_id=name) for name in ("bm25", "tas")}

    for label, config in (("scenario1 (tradeoff-willing)", config1),
                          ("scenario2 (no cost increase)", parse_config(FIXTURES / "scenario2.json"))):
        bundle = run_decision(DecisionInputs(config=config, runs=runs, **shared))
        verdict = bundle["verdicts"][0]
        print(f"=== {label} ===")
        symbols = {r["id"]: r["outcome"]["symbol"] for r in bundle["criteria"]}
        print("  criteria: " + "  ".join(f"{cid} {sym}" for cid, sym in symbols.items()))
        print(f"  chosen system: {bundle['chosen_system']}  frontier: {bundle['pareto']['frontier']}")
        print(f"  verdict: {verdict['decision'].upper()}")
        for reason in verdict["reasons"]:
            print(f"    - {reason}")
        print()

    out_dir = Path(__file__).resolve().parent / "output"
    out_dir.mkdir(exist_ok=True)
    out = out_dir / "bundle.json"
    bundle = run_decision(DecisionInputs(config=config1, runs=runs, **shared))
    write_bundle(bundle, out)
    (out_dir / "report.md").write_text(render_report(bundle), encoding="utf-8")
    print(f"wrote {out} and report.md; serve them with:")
    print(f"  retdecide serve --bundle {out} --ui-dir frontend/dist")


if __name__ == "__main__":
    main()
