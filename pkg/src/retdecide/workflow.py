"""End-to-end decision pipeline: evaluate criteria, run both rules, emit the bundle."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Any

from . import bundle as bundle_mod
from .config import CostCap, CriterionSpec, FrameworkConfig, validate_costs_cover
from .costs import WEIGHT_PRESETS, CostTable, aggregate_cost, check_efficiency
from .data import Collection, Qrels, QuerySet, RunFile
from .decision import (
    DEFAULT_OBJECTIVES,
    CriterionRecord,
    SystemPoint,
    Verdict,
    apply_cost_cap,
    decide_candidate,
    pareto_frontier,
    utility_rank,
)
from .errors import ConfigError, EvaluationError
from .guardrails import check_margin, margin_regressions, run_guardrail
from .metrics import MetricSpec, PerQueryScores, evaluate, mean_score
from .significance import compare
from .slicing import (
    QuerySlice,
    slice_by_length,
    slice_by_lexical_overlap,
    slice_by_min_frequency,
    slice_from_file,
    slice_out_of_distribution,
)


@dataclass(frozen=True)
class DecisionInputs:
    config: FrameworkConfig
    runs: dict[str, RunFile]
    qrels: Qrels
    costs: CostTable
    queries: QuerySet | None = None
    collection: Collection | None = None


def _candidates(config: FrameworkConfig, runs: dict[str, RunFile]) -> list[str]:
    if config.candidates:
        return list(config.candidates)
    return sorted(set(runs) - {config.incumbent})


def _validate(inputs: DecisionInputs) -> list[str]:
    config = inputs.config
    if config.incumbent not in inputs.runs:
        raise ConfigError(f"incumbent {config.incumbent!r} has no run file")
    candidates = _candidates(config, inputs.runs)
    if not candidates:
        raise ConfigError("no candidate system: provide at least one non-incumbent run")
    for candidate in candidates:
        if candidate not in inputs.runs:
            raise ConfigError(f"candidate {candidate!r} has no run file")
    systems = [config.incumbent] + candidates
    validate_costs_cover(inputs.costs, config.weights, systems)
    if config.anchor_id not in inputs.costs.systems:
        raise ConfigError(f"anchor {config.anchor_id!r} has no cost record")
    return candidates


def _metric_for(spec: CriterionSpec, config: FrameworkConfig) -> MetricSpec:
    if "metric" in spec.params:
        metric = MetricSpec.parse(str(spec.params["metric"]))
        if config.metric.binarization_threshold is not None and metric.binarization_threshold is None:
            metric = MetricSpec(metric.kind, metric.cutoff, config.metric.binarization_threshold)
        return metric
    return config.metric


def _build_slice(spec: CriterionSpec, inputs: DecisionInputs, candidate_run: RunFile) -> QuerySlice:
    config = inputs.config
    if inputs.queries is None:
        raise ConfigError(f"criterion {spec.criterion_id!r} needs the query file")
    p = spec.params
    if spec.type == "length":
        return slice_by_length(inputs.queries, float(p["m"]), float(p["n"]), name=spec.criterion_id)
    if spec.type == "frequency":
        if inputs.collection is None:
            raise ConfigError(f"criterion {spec.criterion_id!r} needs the collection file")
        return slice_by_min_frequency(
            inputs.queries,
            inputs.collection,
            float(p["m"]),
            float(p["n"]),
            statistic=p.get("statistic", config.frequency_statistic),
            name=spec.criterion_id,
        )
    if spec.type == "lexical":
        if inputs.collection is None:
            raise ConfigError(f"criterion {spec.criterion_id!r} needs the collection file")
        return slice_by_lexical_overlap(
            candidate_run,
            inputs.queries,
            inputs.collection,
            max_overlap=int(p["max_overlap"]),
            depth=int(p.get("depth", 1)),
            name=spec.criterion_id,
        )
    if spec.type == "out_of_distribution":
        from .data import parse_queries

        train = parse_queries(config.resolve_path(str(p["train_queries"])), config.tokenizer)
        return slice_out_of_distribution(inputs.queries, train, float(p["epsilon"]), name=spec.criterion_id)
    if spec.type == "file":
        return slice_from_file(str(config.resolve_path(str(p["path"]))), inputs.queries, name=spec.criterion_id)
    raise ConfigError(f"criterion {spec.criterion_id!r} is not slice-based")


def _evaluate_criterion(
    spec: CriterionSpec,
    inputs: DecisionInputs,
    candidate: str,
    scores: dict[str, dict[str, PerQueryScores]],
    agg_costs: dict[str, float],
) -> CriterionRecord:
    """One criterion for one candidate; evidence captures all raw numbers."""
    config = inputs.config
    p = spec.params
    metric = _metric_for(spec, config)
    evidence: dict[str, Any] = {"type": spec.type}

    def metric_scores(system_id: str) -> PerQueryScores:
        per_system = scores.setdefault(metric.name, {})
        if system_id not in per_system:
            per_system[system_id] = evaluate(inputs.runs[system_id], inputs.qrels, metric)
        return per_system[system_id]

    if spec.type == "effectiveness":
        alpha = float(p.get("alpha", config.alpha))
        margin = float(p.get("margin", config.practical_margin))
        comparison = compare(metric_scores(config.incumbent), metric_scores(candidate), alpha, margin)
        evidence.update(metric=metric.name, comparison=bundle_mod.comparison_to_json(comparison))
        return CriterionRecord(spec.criterion_id, spec.kind, comparison.outcome, evidence)

    if spec.type == "efficiency":
        target = p.get("target", "aggregated")
        if target == "aggregated":
            cost_b, cost_a = agg_costs[candidate], agg_costs[config.anchor_id]
        else:
            factors_b = inputs.costs.factors(candidate)
            factors_a = inputs.costs.factors(config.anchor_id)
            if target not in factors_b or target not in factors_a:
                raise ConfigError(f"criterion {spec.criterion_id!r}: unknown cost factor {target!r}")
            cost_b, cost_a = factors_b[target], factors_a[target]
        factor_cap = p.get("factor_cap")
        margin_cap = p.get("margin_cap")
        label = check_efficiency(
            cost_b,
            cost_a,
            factor_cap=float(factor_cap) if factor_cap is not None else None,
            margin_cap=float(margin_cap) if margin_cap is not None else None,
        )
        evidence.update(
            target=target,
            cost_candidate=cost_b,
            cost_anchor=cost_a,
            factor_cap=factor_cap,
            margin_cap=margin_cap,
        )
        return CriterionRecord(spec.criterion_id, spec.kind, label, evidence)

    if spec.type == "margin":
        report = margin_regressions(metric_scores(config.incumbent), metric_scores(candidate), float(p["delta"]))
        report = check_margin(report, float(p["threshold"]))
        evidence.update(metric=metric.name, margin=bundle_mod.margin_to_json(report))
        return CriterionRecord(spec.criterion_id, spec.kind, report.outcome, evidence)

    # Slice-based robustness criteria.
    slice_ = _build_slice(spec, inputs, inputs.runs[candidate])
    alpha = float(p.get("alpha", config.alpha))
    report = run_guardrail(
        spec.criterion_id,
        slice_,
        metric_scores(config.incumbent),
        metric_scores(candidate),
        alpha=alpha,
        min_slice_size=int(p.get("min_slice_size", config.min_slice_size)),
    )
    evidence.update(metric=metric.name, guardrail=bundle_mod.guardrail_to_json(report))
    return CriterionRecord(spec.criterion_id, spec.kind, report.outcome, evidence)


def apply_scenario(config: FrameworkConfig, fragment: dict[str, Any]) -> FrameworkConfig:
    """Overlay an exported what-if scenario (weights / lambda / cost cap) onto a config."""
    unknown = set(fragment) - {"schema_version", "weights", "weight_preset", "lambda", "cost_cap", "chosen_system"}
    if unknown:
        raise ConfigError(f"scenario fragment has unknown fields: {sorted(unknown)}")
    updates: dict[str, Any] = {}
    if "weight_preset" in fragment:
        preset = fragment["weight_preset"]
        if preset not in WEIGHT_PRESETS:
            raise ConfigError(f"unknown weight preset {preset!r}")
        updates["weights"] = dict(WEIGHT_PRESETS[preset])
    if "weights" in fragment:
        updates["weights"] = {str(k): float(v) for k, v in fragment["weights"].items()}
    if "lambda" in fragment:
        updates["lam"] = float(fragment["lambda"])
    if "cost_cap" in fragment:
        cap = fragment["cost_cap"]
        updates["cost_cap"] = CostCap(
            mode=cap.get("mode", "absolute"),
            value=float(cap["value"]) if cap.get("value") is not None else None,
            on=cap.get("on", "aggregated_cost"),
        )
    if "chosen_system" in fragment:
        updates["chosen_system"] = fragment["chosen_system"]
    return replace(config, **updates)


def run_decision(inputs: DecisionInputs) -> dict[str, Any]:
    """Execute the full decision procedure and return the bundle document."""
    config = inputs.config
    candidates = _validate(inputs)
    systems = [config.incumbent] + candidates

    # Primary-metric scores per system, cached per metric name so criterion
    # overrides (e.g. a margin rule on MRR) evaluate each run once.
    scores: dict[str, dict[str, PerQueryScores]] = {config.metric.name: {}}
    for system_id in systems:
        scores[config.metric.name][system_id] = evaluate(inputs.runs[system_id], inputs.qrels, config.metric)

    anchor_factors = inputs.costs.factors(config.anchor_id)
    agg = {
        sid: aggregate_cost(inputs.costs.factors(sid), anchor_factors, config.weights, sid, config.anchor_id)
        for sid in systems
    }
    agg_values = {sid: ac.value for sid, ac in agg.items()}

    points = []
    means = {}
    for sid in systems:
        result = mean_score(scores[config.metric.name][sid])
        means[sid] = result
        points.append(
            SystemPoint(
                system_id=sid,
                effectiveness=result.mean,
                cost_vector=inputs.costs.factors(sid),
                aggregated_cost=agg_values[sid],
            )
        )

    pareto_full = pareto_frontier(points, DEFAULT_OBJECTIVES)

    cap = config.cost_cap
    if cap.mode == "none":
        capped_points = points
        cap_value = None
    else:
        cap_value = math.fsum(w for w in config.weights.values()) if cap.mode == "anchor" else cap.value
        capped_points = apply_cost_cap(points, cap_value, on=cap.on)
    if capped_points:
        pareto_rule_basis = pareto_frontier(capped_points, DEFAULT_OBJECTIVES)
        ranking = utility_rank(capped_points, config.lam)
        chosen = config.chosen_system or ranking[0][0]
    else:
        incumbent_point = [p for p in points if p.system_id == config.incumbent]
        pareto_rule_basis = pareto_frontier(incumbent_point, DEFAULT_OBJECTIVES)
        ranking = utility_rank(incumbent_point, config.lam)
        chosen = config.chosen_system or config.incumbent
    if chosen not in {p.system_id for p in points}:
        raise EvaluationError(f"chosen system {chosen!r} is not among the analyzed systems")
    if chosen not in {p.system_id for p in capped_points} and chosen != config.incumbent:
        raise EvaluationError(f"chosen system {chosen!r} is excluded by the cost cap")

    if not config.criteria:
        raise ConfigError("config declares no criteria")

    criteria_json: list[dict[str, Any]] = []
    verdicts: list[Verdict] = []
    for candidate in candidates:
        records = [
            _evaluate_criterion(spec, inputs, candidate, scores, agg_values) for spec in config.criteria
        ]
        verdict = decide_candidate(candidate, records, pareto_rule_basis, chosen)
        verdicts.append(verdict)
        for record in records:
            criteria_json.append(
                {
                    "candidate": candidate,
                    "id": record.criterion_id,
                    "kind": record.kind,
                    "outcome": bundle_mod.outcome_to_json(record.outcome),
                    "evidence": record.evidence,
                }
            )

    primary_scores = scores[config.metric.name]
    doc: dict[str, Any] = {
        "schema_version": bundle_mod.BUNDLE_SCHEMA_VERSION,
        "incumbent": config.incumbent,
        "anchor": config.anchor_id,
        "candidates": candidates,
        "metric": config.metric.name,
        "significance": {
            "alpha": config.alpha,
            "practical_margin": config.practical_margin,
            "min_slice_size": config.min_slice_size,
        },
        "weights": dict(sorted(config.weights.items())),
        "weight_presets": {name: dict(sorted(w.items())) for name, w in WEIGHT_PRESETS.items()},
        "decision_line": {"lambda": config.lam},
        "cost_cap": {"mode": cap.mode, "value": cap_value, "on": cap.on},
        "chosen_system": chosen,
        "utility_ranking": [[sid, u] for sid, u in ranking],
        "systems": [
            {
                "system_id": sid,
                "effectiveness": means[sid].mean,
                "evaluated_queries": means[sid].n,
                "skipped_queries": means[sid].skipped,
                "costs": {name: f.value for name, f in sorted(inputs.costs.systems[sid].items())},
                "cost_units": {name: f.unit for name, f in sorted(inputs.costs.systems[sid].items())},
                "aggregated_cost": bundle_mod.aggregated_cost_to_json(agg[sid]),
            }
            for sid in systems
        ],
        "per_query_scores": {
            sid: {qid: primary_scores[sid].scores[qid] for qid in sorted(primary_scores[sid].scores)}
            for sid in systems
        },
        "skipped": {sid: sorted(primary_scores[sid].skipped) for sid in systems},
        "criteria": criteria_json,
        "pareto": bundle_mod.pareto_to_json(pareto_full),
        "pareto_after_cap": bundle_mod.pareto_to_json(pareto_rule_basis),
        "capped_out": sorted({p.system_id for p in points} - {p.system_id for p in capped_points}),
        "verdicts": [bundle_mod.verdict_to_json(v) for v in verdicts],
        "qualitative_notes": dict(sorted(config.qualitative_notes.items())),
    }
    return doc
