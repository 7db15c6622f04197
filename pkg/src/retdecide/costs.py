"""Cost transformation, weighting, aggregation, and the efficiency criterion.

Cost factors are an open map (latency/indexing/storage are just the
canonical preset); every factor is normalized by the anchor system's
value before weighting, so aggregated cost is unit-free and the anchor's
own aggregated cost always equals the sum of the weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, EvaluationError
from .outcomes import Outcome, OutcomeLabel

# Weight presets explored in the what-if analysis. The first mirrors a
# latency-dominated service; the last drops indexing as a dismissible
# one-time cost for static collections.
WEIGHT_PRESETS: dict[str, dict[str, float]] = {
    "latency-focus": {"latency": 10.0, "indexing": 1.0, "storage": 1.0},
    "indexing-focus": {"latency": 1.0, "indexing": 10.0, "storage": 1.0},
    "balanced": {"latency": 1.0, "indexing": 1.0, "storage": 1.0},
    "static-collection": {"latency": 10.0, "indexing": 0.0, "storage": 1.0},
}


@dataclass(frozen=True)
class CostFactor:
    value: float
    unit: str = ""


@dataclass(frozen=True)
class CostTable:
    """Per-system cost factors; all values strictly positive (they anchor ratios)."""

    systems: dict[str, dict[str, CostFactor]]

    def factors(self, system_id: str) -> dict[str, float]:
        if system_id not in self.systems:
            raise EvaluationError(f"no cost record for system {system_id!r}")
        return {name: f.value for name, f in self.systems[system_id].items()}


@dataclass(frozen=True)
class AggregatedCost:
    system_id: str
    anchor_id: str
    value: float
    contributions: dict[str, float]


def comparative_transform(x: float, y: float, alpha: float) -> float:
    """Scaled ratio putting a cost measurement on the anchor's scale."""
    if y <= 0:
        raise EvaluationError(f"transform anchor must be > 0, got {y}")
    if alpha < 0:
        raise EvaluationError(f"importance weight must be >= 0, got {alpha}")
    return (x / y) * alpha


def validate_weights(weights: dict[str, float]) -> None:
    if not weights:
        raise ConfigError("cost weights are empty")
    for name, w in weights.items():
        if w < 0:
            raise ConfigError(f"cost weight for {name!r} must be >= 0, got {w}")
    if all(w == 0 for w in weights.values()):
        raise ConfigError("at least one cost weight must be positive")


def aggregate_cost(
    costs: dict[str, float],
    anchor_costs: dict[str, float],
    weights: dict[str, float],
    system_id: str = "",
    anchor_id: str = "",
) -> AggregatedCost:
    """Weighted sum of anchor-normalized factor ratios.

    Factors with zero weight are ignored entirely; a weighted factor
    missing from either side is an error naming the factor.
    """
    validate_weights(weights)
    contributions: dict[str, float] = {}
    for name, w in weights.items():
        if w == 0:
            continue
        if name not in costs:
            raise EvaluationError(f"system {system_id or '<candidate>'} is missing cost factor {name!r}")
        if name not in anchor_costs:
            raise EvaluationError(f"anchor {anchor_id or '<anchor>'} is missing cost factor {name!r}")
        contributions[name] = comparative_transform(costs[name], anchor_costs[name], w)
    return AggregatedCost(
        system_id=system_id,
        anchor_id=anchor_id,
        value=math.fsum(contributions[k] for k in sorted(contributions)),
        contributions=contributions,
    )


def check_efficiency(
    cost_b: float,
    cost_a: float,
    factor_cap: float | None = None,
    margin_cap: float | None = None,
) -> OutcomeLabel:
    """Efficiency criterion on a single factor or an aggregated cost.

    Exactly one cap must be set. Factor mode fails when B costs more than
    factor_cap times A; margin mode fails when B exceeds A by more than
    margin_cap in absolute units. The symmetric inversion awards a win
    when A would fail the same check against B.
    """
    if (factor_cap is None) == (margin_cap is None):
        raise ConfigError("exactly one of factor_cap (N) and margin_cap (D) must be set")
    if factor_cap is not None:
        if factor_cap <= 0:
            raise ConfigError(f"factor cap must be > 0, got {factor_cap}")
        if cost_b > factor_cap * cost_a:
            return OutcomeLabel(Outcome.LOSS, f"cost {cost_b:g} > {factor_cap:g} x {cost_a:g}")
        if cost_a > factor_cap * cost_b:
            return OutcomeLabel(Outcome.WIN, f"cost {cost_b:g} beats cap inverted: {cost_a:g} > {factor_cap:g} x {cost_b:g}")
        return OutcomeLabel(Outcome.TIE, f"cost {cost_b:g} within {factor_cap:g} x {cost_a:g}")
    if margin_cap < 0:
        raise ConfigError(f"margin cap must be >= 0, got {margin_cap}")
    if cost_b - cost_a > margin_cap:
        return OutcomeLabel(Outcome.LOSS, f"cost {cost_b:g} exceeds {cost_a:g} by more than {margin_cap:g}")
    if cost_a - cost_b > margin_cap:
        return OutcomeLabel(Outcome.WIN, f"cost {cost_b:g} undercuts {cost_a:g} by more than {margin_cap:g}")
    return OutcomeLabel(Outcome.TIE, f"cost difference {cost_b - cost_a:+g} within margin {margin_cap:g}")
