"""Command-line entry points.

Subcommands wrap the library one-to-one; machine-readable output always
goes through ``--out`` files while stdout stays human-readable. Exit
codes: 0 success (or deploy verdict), 1 reject verdict / failing
guardrail, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import functools
import http.server
import json
import os
import sys
import webbrowser
from pathlib import Path

from . import bundle as bundle_mod
from .config import parse_config, parse_costs
from .data import format_scores_tsv, parse_collection, parse_queries, parse_qrels, parse_run
from .errors import RetdecideError
from .guardrails import check_margin, margin_regressions, run_guardrail
from .metrics import MetricSpec, evaluate, mean_score
from .significance import DEFAULT_ALPHA, DEFAULT_MIN_SLICE_SIZE, compare
from .slicing import (
    parse_bins,
    slice_by_length,
    slice_by_lexical_overlap,
    slice_by_min_frequency,
    slice_from_file,
    slice_out_of_distribution,
)
from .workflow import DecisionInputs, apply_scenario, run_decision

CONFIG_ENV_VAR = "RETDECIDE_CONFIG"


def _metric_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--metric", default="ndcg@10", help="metric spec, e.g. ndcg@10, mrr@10, recall@100, p@1")
    parser.add_argument("--min-grade", type=int, default=None,
                        help="binarization grade threshold override for rr/recall/precision")


def _parse_metric(args: argparse.Namespace) -> MetricSpec:
    metric = MetricSpec.parse(args.metric)
    if args.min_grade is not None:
        metric = MetricSpec(metric.kind, metric.cutoff, args.min_grade)
    return metric


def _write_out(args: argparse.Namespace, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")


def cmd_evaluate(args: argparse.Namespace) -> int:
    run = parse_run(args.run)
    qrels = parse_qrels(args.qrels)
    metric = _parse_metric(args)
    per_query = evaluate(run, qrels, metric)
    result = mean_score(per_query)
    _write_out(args, format_scores_tsv(per_query.scores))
    print(f"{run.system_id}  {metric.name}  mean={result.mean:.6f}  n={result.n}  skipped={result.skipped}")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    baseline = parse_run(args.baseline)
    candidate = parse_run(args.candidate)
    qrels = parse_qrels(args.qrels)
    metric = _parse_metric(args)
    scores_a = evaluate(baseline, qrels, metric)
    scores_b = evaluate(candidate, qrels, metric)
    comparison = compare(scores_a, scores_b, alpha=args.alpha, practical_margin=args.margin)
    doc = {
        "baseline": baseline.system_id,
        "candidate": candidate.system_id,
        "metric": metric.name,
        "alpha": args.alpha,
        "practical_margin": args.margin,
        "comparison": bundle_mod.comparison_to_json(comparison),
    }
    _write_out(args, json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    out = comparison.outcome
    print(
        f"{candidate.system_id} vs {baseline.system_id} on {metric.name}: {out.symbol}  "
        f"mean {comparison.mean_a:.4f} -> {comparison.mean_b:.4f}  "
        f"delta={comparison.practical_delta:+.4f}  t={comparison.t_statistic:.3f}  p={comparison.p_value:.4g}"
    )
    print(f"  {out.note}")
    return 0


def _guardrail_common(sub: argparse.ArgumentParser, needs_queries: bool = True) -> None:
    sub.add_argument("--baseline", required=True, help="incumbent run file")
    sub.add_argument("--candidate", required=True, help="candidate run file")
    sub.add_argument("--qrels", required=True)
    if needs_queries:
        sub.add_argument("--queries", required=True, help="TSV query file")
    _metric_arg(sub)
    sub.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    sub.add_argument("--min-slice-size", type=int, default=DEFAULT_MIN_SLICE_SIZE)
    sub.add_argument("--out", default=None, help="write the JSON report here")


def _run_slice_guardrails(args: argparse.Namespace, slices) -> int:
    baseline = parse_run(args.baseline)
    candidate = parse_run(args.candidate)
    qrels = parse_qrels(args.qrels)
    metric = _parse_metric(args)
    scores_a = evaluate(baseline, qrels, metric)
    scores_b = evaluate(candidate, qrels, metric)
    reports = []
    for slice_ in slices:
        reports.append(
            run_guardrail(slice_.name, slice_, scores_a, scores_b, alpha=args.alpha, min_slice_size=args.min_slice_size)
        )
    doc = {
        "baseline": baseline.system_id,
        "candidate": candidate.system_id,
        "metric": metric.name,
        "alpha": args.alpha,
        "reports": [
            dict(bundle_mod.guardrail_to_json(r), outcome=bundle_mod.outcome_to_json(r.outcome)) for r in reports
        ],
    }
    _write_out(args, json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    any_loss = False
    for report in reports:
        c = report.comparison
        stats = f"mean {c.mean_a:.4f} -> {c.mean_b:.4f}  p={c.p_value:.4g}" if c else "n/a"
        print(f"{report.outcome.symbol}  {report.slice.name}  n={report.slice_size}  {stats}")
        print(f"   {report.outcome.note}")
        any_loss = any_loss or report.outcome.is_loss()
    return 1 if any_loss else 0


def cmd_guardrail_length(args: argparse.Namespace) -> int:
    queries = parse_queries(args.queries)
    bins = parse_bins(args.bins)
    return _run_slice_guardrails(args, [slice_by_length(queries, m, n) for m, n in bins])


def cmd_guardrail_frequency(args: argparse.Namespace) -> int:
    queries = parse_queries(args.queries)
    collection = parse_collection(args.collection)
    bins = parse_bins(args.bins)
    slices = [slice_by_min_frequency(queries, collection, m, n, statistic=args.statistic) for m, n in bins]
    return _run_slice_guardrails(args, slices)


def cmd_guardrail_lexical(args: argparse.Namespace) -> int:
    queries = parse_queries(args.queries)
    collection = parse_collection(args.collection)
    candidate = parse_run(args.candidate)
    slice_ = slice_by_lexical_overlap(candidate, queries, collection, args.max_overlap, args.depth)
    return _run_slice_guardrails(args, [slice_])


def cmd_guardrail_memory(args: argparse.Namespace) -> int:
    queries = parse_queries(args.queries)
    train = parse_queries(args.train_queries)
    slice_ = slice_out_of_distribution(queries, train, args.epsilon)
    return _run_slice_guardrails(args, [slice_])


def cmd_guardrail_file(args: argparse.Namespace) -> int:
    queries = parse_queries(args.queries)
    slice_ = slice_from_file(args.slice_file, queries)
    return _run_slice_guardrails(args, [slice_])


def cmd_guardrail_margin(args: argparse.Namespace) -> int:
    baseline = parse_run(args.baseline)
    candidate = parse_run(args.candidate)
    qrels = parse_qrels(args.qrels)
    metric = _parse_metric(args)
    scores_a = evaluate(baseline, qrels, metric)
    scores_b = evaluate(candidate, qrels, metric)
    report = check_margin(margin_regressions(scores_a, scores_b, args.delta), args.threshold)
    doc = {
        "baseline": baseline.system_id,
        "candidate": candidate.system_id,
        "metric": metric.name,
        "margin": bundle_mod.margin_to_json(report),
        "outcome": bundle_mod.outcome_to_json(report.outcome),
    }
    _write_out(args, json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    if args.regressed_out:
        Path(args.regressed_out).write_text(
            "".join(qid + "\n" for qid in sorted(report.regressed_query_ids)), encoding="utf-8"
        )
    print(
        f"{report.outcome.symbol}  margin delta={report.delta:g}: "
        f"{len(report.regressed_query_ids)}/{report.n_evaluated} regressed "
        f"({report.regressed_fraction * 100:.4g}% vs {args.threshold * 100:g}% tolerated)"
    )
    return 1 if report.outcome.is_loss() else 0


def cmd_decide(args: argparse.Namespace) -> int:
    config_path = args.config or os.environ.get(CONFIG_ENV_VAR)
    if not config_path:
        raise RetdecideError(f"no config: pass --config or set ${CONFIG_ENV_VAR}")
    config = parse_config(config_path)
    if args.scenario:
        fragment = json.loads(Path(args.scenario).read_text(encoding="utf-8"))
        config = apply_scenario(config, fragment)
    runs = {}
    for item in args.run:
        name, _, path = item.partition("=")
        if not _ or not name or not path:
            raise RetdecideError(f"--run expects NAME=PATH, got {item!r}")
        runs[name] = parse_run(path, system_id=name)
    inputs = DecisionInputs(
        config=config,
        runs=runs,
        qrels=parse_qrels(args.qrels),
        costs=parse_costs(args.costs),
        queries=parse_queries(args.queries, config.tokenizer) if args.queries else None,
        collection=parse_collection(args.collection, config.tokenizer) if args.collection else None,
    )
    doc = run_decision(inputs)
    if args.out:
        bundle_mod.write_bundle(doc, args.out)
    if args.report:
        Path(args.report).write_text(bundle_mod.render_report(doc), encoding="utf-8")
    deploy = False
    for verdict in doc["verdicts"]:
        print(f"{verdict['candidate']}: {verdict['decision'].upper()}")
        for reason in verdict["reasons"]:
            print(f"  - {reason}")
        deploy = deploy or verdict["decision"] == "deploy"
    return 0 if deploy else 1


class _BundleHandler(http.server.SimpleHTTPRequestHandler):
    bundle_path: Path
    ui_dir: Path | None

    def do_GET(self):  # noqa: N802 (http.server API)
        if self.path.split("?")[0] == "/bundle.json":
            body = self.bundle_path.read_bytes()
            self.send_response(200)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)
            return
        if self.ui_dir is None:
            body = (
                b"<!doctype html><title>decision bundle</title>"
                b"<p>No UI build configured; the bundle is at <a href='/bundle.json'>/bundle.json</a>.</p>"
            )
            self.send_response(200)
            self.send_header("Content-Type", "text/html; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)
            return
        super().do_GET()

    def log_message(self, fmt, *args):  # quiet by default
        pass


def cmd_serve(args: argparse.Namespace) -> int:
    bundle_path = Path(args.bundle)
    if not bundle_path.is_file():
        raise RetdecideError(f"bundle not found: {bundle_path}")
    bundle_mod.parse_bundle(bundle_path)  # validate before serving
    ui_dir = Path(args.ui_dir) if args.ui_dir else None
    if ui_dir is not None and not ui_dir.is_dir():
        raise RetdecideError(f"UI directory not found: {ui_dir}")

    handler_cls = type("Handler", (_BundleHandler,), {"bundle_path": bundle_path, "ui_dir": ui_dir})
    handler = handler_cls if ui_dir is None else functools.partial(handler_cls, directory=str(ui_dir))
    server = http.server.ThreadingHTTPServer((args.host, args.port), handler)
    url = f"http://{args.host}:{server.server_address[1]}/"
    print(f"serving bundle at {url}bundle.json", flush=True)
    if not args.no_open:
        webbrowser.open(url)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="retdecide", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="score one run against qrels")
    p.add_argument("--run", required=True)
    p.add_argument("--qrels", required=True)
    _metric_arg(p)
    p.add_argument("--out", default=None, help="write per-query scores TSV here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="paired significance comparison of two runs")
    p.add_argument("--baseline", required=True)
    p.add_argument("--candidate", required=True)
    p.add_argument("--qrels", required=True)
    _metric_arg(p)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--margin", type=float, default=0.0, help="practical significance margin")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_compare)

    g = sub.add_parser("guardrail", help="robustness checks over query slices")
    gsub = g.add_subparsers(dest="kind", required=True)

    p = gsub.add_parser("length", help="token-length slices")
    _guardrail_common(p)
    p.add_argument("--bins", required=True, help="open-interval bins m:n,m:n (n may be 'inf')")
    p.set_defaults(func=cmd_guardrail_length)

    p = gsub.add_parser("frequency", help="minimum term-frequency slices")
    _guardrail_common(p)
    p.add_argument("--collection", required=True)
    p.add_argument("--bins", required=True)
    p.add_argument("--statistic", default="collection_frequency",
                   choices=["collection_frequency", "document_frequency"])
    p.set_defaults(func=cmd_guardrail_frequency)

    p = gsub.add_parser("lexical", help="low lexical overlap in the candidate's top ranks")
    _guardrail_common(p)
    p.add_argument("--collection", required=True)
    p.add_argument("--max-overlap", type=int, required=True)
    p.add_argument("--depth", type=int, default=1)
    p.set_defaults(func=cmd_guardrail_lexical)

    p = gsub.add_parser("memory", help="out-of-distribution queries vs a training set")
    _guardrail_common(p)
    p.add_argument("--train-queries", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.set_defaults(func=cmd_guardrail_memory)

    p = gsub.add_parser("file", help="externally curated qid list")
    _guardrail_common(p)
    p.add_argument("--slice-file", required=True)
    p.set_defaults(func=cmd_guardrail_file)

    p = gsub.add_parser("margin", help="per-query regression margin rule")
    _guardrail_common(p, needs_queries=False)
    p.add_argument("--delta", type=float, required=True, help="per-query regression margin in (0, 1]")
    p.add_argument("--threshold", type=float, required=True, help="tolerated regressed fraction in [0, 1]")
    p.add_argument("--regressed-out", default=None, help="write regressed qids here")
    p.set_defaults(func=cmd_guardrail_margin)

    p = sub.add_parser("decide", help="full decision procedure; exit 0 deploy, 1 reject")
    p.add_argument("--config", default=None, help=f"framework config (default: ${CONFIG_ENV_VAR})")
    p.add_argument("--run", action="append", required=True, metavar="NAME=PATH")
    p.add_argument("--qrels", required=True)
    p.add_argument("--costs", required=True)
    p.add_argument("--queries", default=None)
    p.add_argument("--collection", default=None)
    p.add_argument("--scenario", default=None, help="what-if scenario fragment overriding weights/lambda/cap")
    p.add_argument("--out", default=None, help="write the decision bundle JSON here")
    p.add_argument("--report", default=None, help="write the markdown report here")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("serve", help="serve the what-if UI and a bundle over HTTP")
    p.add_argument("--bundle", required=True)
    p.add_argument("--port", type=int, default=8017)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ui-dir", default=None, help="directory with the built UI (served at /)")
    p.add_argument("--no-open", action="store_true", help="do not launch a browser")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RetdecideError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
