"""Decision bundle: the self-contained JSON record of a decision run.

The bundle carries everything a downstream viewer needs (raw cost tables,
per-query scores, criterion outcomes, Pareto analysis, verdicts), so cost
weights and decision lines can be re-applied without touching the
original input files. Serialization is canonical: sorted keys, fixed
separators, repr floats; identical analyses produce identical bytes.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

from .costs import AggregatedCost
from .decision import ParetoResult, Verdict
from .errors import ConfigError
from .guardrails import GuardrailReport, MarginReport
from .outcomes import OutcomeLabel
from .significance import ComparisonResult

BUNDLE_SCHEMA_VERSION = 1


def _finite(x: float | None) -> float | None:
    """JSON has no Infinity/NaN; degenerate statistics serialize as null."""
    if x is None or not math.isfinite(x):
        return None
    return float(x)


def _jsonable(value: Any) -> Any:
    """Make provenance values JSON-safe: open bin edges become 'inf'/'-inf'."""
    if isinstance(value, float) and not math.isfinite(value):
        return "inf" if value > 0 else "-inf"
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def outcome_to_json(label: OutcomeLabel) -> dict[str, str]:
    return {"label": label.outcome.value, "symbol": label.symbol, "note": label.note}


def comparison_to_json(c: ComparisonResult) -> dict[str, Any]:
    return {
        "mean_a": c.mean_a,
        "mean_b": c.mean_b,
        "n": c.n,
        "t_statistic": _finite(c.t_statistic),
        "p_value": c.p_value,
        "practical_delta": c.practical_delta,
        "degenerate_variance": c.degenerate_variance,
        "outcome": outcome_to_json(c.outcome),
    }


def guardrail_to_json(report: GuardrailReport) -> dict[str, Any]:
    return {
        "slice_name": report.slice.name,
        "selector": _jsonable(report.slice.selector),
        "system_independent": report.slice.system_independent,
        "slice_total": len(report.slice.query_ids),
        "slice_size": report.slice_size,
        "skipped_count": report.skipped_count,
        "comparison": comparison_to_json(report.comparison) if report.comparison else None,
        "warnings": list(report.slice.warnings),
    }


def margin_to_json(report: MarginReport) -> dict[str, Any]:
    return {
        "delta": report.delta,
        "threshold": report.threshold,
        "n_evaluated": report.n_evaluated,
        "regressed_count": len(report.regressed_query_ids),
        "regressed_fraction": report.regressed_fraction,
        "regressed_query_ids": sorted(report.regressed_query_ids),
    }


def aggregated_cost_to_json(ac: AggregatedCost) -> dict[str, Any]:
    return {"value": ac.value, "anchor": ac.anchor_id, "contributions": dict(sorted(ac.contributions.items()))}


def pareto_to_json(result: ParetoResult) -> dict[str, Any]:
    return {
        "objectives": [{"key": o.key, "direction": o.direction} for o in result.objectives],
        "frontier": list(result.frontier),
        "dominated": dict(sorted(result.dominated.items())),
    }


def verdict_to_json(v: Verdict) -> dict[str, Any]:
    return {"candidate": v.candidate, "decision": v.decision, "reasons": list(v.reasons)}


def dumps_bundle(bundle: dict[str, Any]) -> str:
    """Canonical bundle serialization (deterministic bytes)."""
    return json.dumps(bundle, sort_keys=True, ensure_ascii=False, indent=2, allow_nan=False) + "\n"


def write_bundle(bundle: dict[str, Any], path: str | Path) -> None:
    Path(path).write_text(dumps_bundle(bundle), encoding="utf-8")


def parse_bundle(source: str | Path) -> dict[str, Any]:
    """Load and minimally validate a bundle document."""
    text = Path(source).read_text(encoding="utf-8") if isinstance(source, (str, Path)) else source
    bundle = json.loads(text)
    if not isinstance(bundle, dict):
        raise ConfigError("bundle must be a JSON object")
    version = bundle.get("schema_version")
    if version != BUNDLE_SCHEMA_VERSION:
        raise ConfigError(f"bundle schema_version {version!r} unsupported (expected {BUNDLE_SCHEMA_VERSION})")
    return bundle


def render_report(bundle: dict[str, Any]) -> str:
    """Human-readable markdown report: criterion table, frontier, verdicts."""
    lines: list[str] = []
    lines.append(f"# Decision report: {' vs '.join([bundle['incumbent']] + bundle['candidates'])}")
    lines.append("")
    lines.append(f"Primary metric: {bundle['metric']}   alpha={bundle['significance']['alpha']}   "
                 f"practical margin={bundle['significance']['practical_margin']}")
    lines.append("")
    lines.append("## Criteria")
    lines.append("")
    lines.append("| criterion | kind | outcome | note |")
    lines.append("|---|---|---|---|")
    for record in bundle["criteria"]:
        out = record["outcome"]
        lines.append(f"| {record['id']} | {record['kind']} | {out['symbol']} | {out['note']} |")
    lines.append("")
    lines.append("## Systems")
    lines.append("")
    lines.append("| system | effectiveness | aggregated cost | on frontier |")
    lines.append("|---|---|---|---|")
    frontier = set(bundle["pareto"]["frontier"])
    for system in bundle["systems"]:
        sid = system["system_id"]
        ac = system["aggregated_cost"]["value"]
        lines.append(f"| {sid} | {system['effectiveness']:.4f} | {ac:.3f} | {'yes' if sid in frontier else 'no'} |")
    dominated = bundle["pareto"]["dominated"]
    if dominated:
        lines.append("")
        for sid, witness in sorted(dominated.items()):
            lines.append(f"- {sid} is dominated by {witness}")
    lines.append("")
    lines.append("## Verdict")
    lines.append("")
    for verdict in bundle["verdicts"]:
        lines.append(f"**{verdict['candidate']}: {verdict['decision'].upper()}**")
        for reason in verdict["reasons"]:
            lines.append(f"- {reason}")
        lines.append("")
    notes = bundle.get("qualitative_notes", {})
    if notes:
        lines.append("## Qualitative notes")
        lines.append("")
        for name in sorted(notes):
            lines.append(f"- **{name}**: {notes[name]}")
        lines.append("")
    return "\n".join(lines)
