"""Pareto analysis, decision lines, and the two-rule deployment verdict.

The significance rule needs at least one win on a primary criterion and
no loss anywhere; the Pareto rule requires the system we would actually
choose to sit on the cost-effectiveness frontier. A candidate is deployed
only when both rules pass and the candidate is the system the configured
decision line selects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigError, EvaluationError
from .outcomes import OutcomeLabel


@dataclass(frozen=True)
class SystemPoint:
    """One system's position in objective space."""

    system_id: str
    effectiveness: float
    cost_vector: dict[str, float] = field(default_factory=dict)
    aggregated_cost: float | None = None

    def __post_init__(self) -> None:
        if not math.isfinite(self.effectiveness):
            raise EvaluationError(f"effectiveness of {self.system_id!r} must be finite")
        for name, value in self.cost_vector.items():
            if value <= 0:
                raise EvaluationError(f"cost {name!r} of {self.system_id!r} must be > 0, got {value}")


@dataclass(frozen=True)
class Objective:
    """What to read off a SystemPoint and which direction is better."""

    key: str  # "effectiveness" | "aggregated_cost" | "cost:<factor>"
    direction: str  # "max" | "min"

    def __post_init__(self) -> None:
        if self.direction not in ("max", "min"):
            raise ConfigError(f"objective direction must be 'max' or 'min', got {self.direction!r}")

    def value(self, point: SystemPoint) -> float:
        if self.key == "effectiveness":
            return point.effectiveness
        if self.key == "aggregated_cost":
            if point.aggregated_cost is None:
                raise EvaluationError(f"system {point.system_id!r} has no aggregated cost")
            return point.aggregated_cost
        if self.key.startswith("cost:"):
            factor = self.key.split(":", 1)[1]
            if factor not in point.cost_vector:
                raise EvaluationError(f"system {point.system_id!r} has no cost factor {factor!r}")
            return point.cost_vector[factor]
        raise ConfigError(f"unknown objective key {self.key!r}")


DEFAULT_OBJECTIVES = (Objective("effectiveness", "max"), Objective("aggregated_cost", "min"))


@dataclass(frozen=True)
class ParetoResult:
    objectives: tuple[Objective, ...]
    frontier: tuple[str, ...]  # input order preserved
    dominated: dict[str, str]  # dominated id -> one witness dominator


def _dominates(a: tuple[float, ...], b: tuple[float, ...], objectives: tuple[Objective, ...]) -> bool:
    """Weak dominance with at least one strict improvement."""
    strictly_better = False
    for va, vb, obj in zip(a, b, objectives):
        if obj.direction == "max":
            if va < vb:
                return False
            if va > vb:
                strictly_better = True
        else:
            if va > vb:
                return False
            if va < vb:
                strictly_better = True
    return strictly_better


def pareto_frontier(points: list[SystemPoint], objectives=DEFAULT_OBJECTIVES) -> ParetoResult:
    """Split systems into the non-dominated frontier and dominated rest.

    Exact duplicates in objective space never dominate each other, so
    they all stay on the frontier. Each dominated system records the
    first dominator in input order as its witness.
    """
    if not points:
        raise EvaluationError("pareto analysis needs at least one system point")
    objectives = tuple(objectives)
    ids = [p.system_id for p in points]
    if len(set(ids)) != len(ids):
        raise EvaluationError("duplicate system ids in pareto input")
    values = [tuple(obj.value(p) for obj in objectives) for p in points]
    frontier: list[str] = []
    dominated: dict[str, str] = {}
    for i, p in enumerate(points):
        witness = None
        for j, q in enumerate(points):
            if i != j and _dominates(values[j], values[i], objectives):
                witness = q.system_id
                break
        if witness is None:
            frontier.append(p.system_id)
        else:
            dominated[p.system_id] = witness
    return ParetoResult(objectives=objectives, frontier=tuple(frontier), dominated=dominated)


def utility_rank(points: list[SystemPoint], lam: float) -> list[tuple[str, float]]:
    """Rank systems by utility = effectiveness - lam * aggregated_cost.

    lam is the decision maker's exchange rate (cost units per unit of
    effectiveness); 0 ranks by effectiveness alone. Ties break toward the
    cheaper system, then by system id.
    """
    if lam < 0:
        raise EvaluationError(f"lambda must be >= 0, got {lam}")
    if not points:
        raise EvaluationError("utility ranking needs at least one system point")
    for p in points:
        if p.aggregated_cost is None:
            raise EvaluationError(f"system {p.system_id!r} has no aggregated cost")
    ranked = sorted(
        ((p.system_id, p.effectiveness - lam * p.aggregated_cost, p.aggregated_cost) for p in points),
        key=lambda row: (-row[1], row[2], row[0]),
    )
    return [(sid, u) for sid, u, _cost in ranked]


def apply_cost_cap(points: list[SystemPoint], cap: float, on: str = "aggregated_cost") -> list[SystemPoint]:
    """Drop systems whose cost exceeds the cap; may leave only the incumbent."""
    if cap <= 0:
        raise EvaluationError(f"cost cap must be > 0, got {cap}")
    objective = Objective(on if on == "aggregated_cost" else f"cost:{on}", "min")
    return [p for p in points if objective.value(p) <= cap]


@dataclass(frozen=True)
class CriterionRecord:
    criterion_id: str
    kind: str  # "primary" | "secondary"
    outcome: OutcomeLabel
    evidence: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in ("primary", "secondary"):
            raise ConfigError(f"criterion kind must be primary or secondary, got {self.kind!r}")


def significance_rule(records: list[CriterionRecord]) -> tuple[bool, list[str]]:
    """Pass iff some primary criterion wins and nothing loses."""
    primaries = [r for r in records if r.kind == "primary"]
    if not primaries:
        raise ConfigError("significance rule needs at least one primary criterion")
    reasons: list[str] = []
    losses = [r for r in records if r.outcome.is_loss()]
    for r in losses:
        reasons.append(f"{r.criterion_id} ({r.kind}) is a loss: {r.outcome.note}")
    wins = [r for r in primaries if r.outcome.is_win()]
    if not wins:
        reasons.append("no primary criterion shows a win")
    passed = bool(wins) and not losses
    if passed:
        reasons = [f"primary win on {r.criterion_id}" for r in wins] + ["no losses on any criterion"]
    return passed, reasons


def pareto_rule(chosen_id: str, pareto: ParetoResult) -> tuple[bool, str]:
    """Pass iff the chosen system sits on the frontier."""
    if chosen_id in pareto.frontier:
        return True, f"{chosen_id} is Pareto optimal"
    if chosen_id in pareto.dominated:
        return False, f"{chosen_id} is dominated by {pareto.dominated[chosen_id]}"
    raise EvaluationError(f"chosen system {chosen_id!r} is absent from the Pareto analysis")


@dataclass(frozen=True)
class Verdict:
    candidate: str
    decision: str  # "deploy" | "reject"
    reasons: tuple[str, ...]

    @property
    def deploy(self) -> bool:
        return self.decision == "deploy"


def decide_candidate(
    candidate_id: str,
    records: list[CriterionRecord],
    pareto: ParetoResult,
    chosen_id: str,
) -> Verdict:
    """Verdict for one candidate against the incumbent.

    Deploy requires: the significance rule passes on the candidate's
    criterion records, the chosen system under the decision line is this
    candidate, and that choice is Pareto optimal.
    """
    sig_passed, sig_reasons = significance_rule(records)
    pareto_passed, pareto_reason = pareto_rule(chosen_id, pareto)
    is_chosen = chosen_id == candidate_id

    if sig_passed and pareto_passed and is_chosen:
        return Verdict(candidate=candidate_id, decision="deploy", reasons=tuple(sig_reasons + [pareto_reason]))

    reasons: list[str] = []
    if not sig_passed:
        reasons.extend(sig_reasons)
    if not is_chosen:
        reasons.append(f"decision line selects {chosen_id}, not {candidate_id}")
    if not pareto_passed:
        reasons.append(pareto_reason)
    return Verdict(candidate=candidate_id, decision="reject", reasons=tuple(reasons))
