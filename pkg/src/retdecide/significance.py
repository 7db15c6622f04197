"""Paired significance testing and win/tie/loss classification.

The two-tailed paired t-test is the default (and only built-in) test; the
t-distribution CDF is evaluated through the regularized incomplete beta
function with a continued-fraction expansion, so no statistics dependency
is needed and results are verifiable against direct quadrature.

A criterion outcome combines statistical significance (p < alpha) with
practical significance (|mean difference| >= margin): a small but
statistically significant gain classifies as a tie.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .errors import EvaluationError
from .metrics import PerQueryScores
from .outcomes import Outcome, OutcomeLabel

DEFAULT_ALPHA = 0.05
DEFAULT_MIN_SLICE_SIZE = 20

_CF_MAX_ITERATIONS = 500
_CF_EPS = 1e-15
_FPMIN = 1e-300


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    """Modified Lentz evaluation of the incomplete beta continued fraction."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITERATIONS + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) to roughly 1e-14 absolute accuracy for moderate a, b."""
    if a <= 0 or b <= 0:
        raise EvaluationError(f"beta parameters must be positive, got a={a}, b={b}")
    if x < 0.0 or x > 1.0:
        raise EvaluationError(f"x must be in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # The continued fraction converges fast only below the distribution
    # bulk; use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) above it.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def student_t_two_sided_p(t: float, df: int) -> float:
    """P(|T| >= |t|) for Student's t with df degrees of freedom."""
    if df < 1:
        raise EvaluationError(f"degrees of freedom must be >= 1, got {df}")
    if math.isinf(t):
        return 0.0
    if t == 0.0:
        return 1.0
    x = df / (df + t * t)
    return regularized_incomplete_beta(df / 2.0, 0.5, x)


def paired_t_test(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    """Two-tailed paired t-test on aligned score sequences.

    Returns (t, p). The degenerate case of identical nonzero differences
    on every query (zero variance, nonzero mean) yields t = +/-inf and
    p = 0; zero differences everywhere yield t = 0, p = 1.
    """
    n = len(a)
    if n != len(b):
        raise EvaluationError(f"paired samples differ in length: {len(a)} vs {len(b)}")
    if n < 2:
        raise EvaluationError(f"paired t-test needs n >= 2, got {n}")
    diffs = [bi - ai for ai, bi in zip(a, b)]
    mean_d = math.fsum(diffs) / n
    var = math.fsum((d - mean_d) ** 2 for d in diffs) / (n - 1)
    sd = math.sqrt(var)
    if sd == 0.0:
        if mean_d == 0.0:
            return 0.0, 1.0
        return math.copysign(math.inf, mean_d), 0.0
    t = mean_d * math.sqrt(n) / sd
    return t, student_t_two_sided_p(t, n - 1)


@dataclass(frozen=True)
class ComparisonResult:
    """Paired comparison of system B against system A on one score set."""

    mean_a: float
    mean_b: float
    n: int
    t_statistic: float
    p_value: float
    practical_delta: float  # mean_b - mean_a
    outcome: OutcomeLabel
    degenerate_variance: bool = False


def classify(p_value: float, delta: float, alpha: float, practical_margin: float) -> OutcomeLabel:
    """Combine statistical and practical significance into win/tie/loss."""
    if p_value < alpha and delta >= practical_margin:
        return OutcomeLabel(Outcome.WIN, f"p={p_value:.4g} < {alpha:g}, delta=+{delta:.4g} >= {practical_margin:g}")
    if p_value < alpha and delta <= -practical_margin:
        return OutcomeLabel(Outcome.LOSS, f"p={p_value:.4g} < {alpha:g}, delta={delta:.4g} <= -{practical_margin:g}")
    if p_value < alpha:
        return OutcomeLabel(Outcome.TIE, f"significant but below practical margin (delta={delta:.4g})")
    return OutcomeLabel(Outcome.TIE, f"not significant (p={p_value:.4g} >= {alpha:g})")


ScoreMap = Mapping[str, float]


def _as_scores(scores: "PerQueryScores | ScoreMap") -> Mapping[str, float]:
    if isinstance(scores, PerQueryScores):
        return scores.scores
    return scores


def common_queries(scores_a: "PerQueryScores | ScoreMap", scores_b: "PerQueryScores | ScoreMap", over=None) -> list[str]:
    """Sorted query ids scored by both systems, optionally within a slice."""
    a = _as_scores(scores_a)
    b = _as_scores(scores_b)
    common = set(a) & set(b)
    if over is not None:
        common &= set(over)
    return sorted(common)


def compare(
    scores_a: "PerQueryScores | ScoreMap",
    scores_b: "PerQueryScores | ScoreMap",
    alpha: float = DEFAULT_ALPHA,
    practical_margin: float = 0.0,
    over=None,
    test: Callable[[Sequence[float], Sequence[float]], tuple[float, float]] = paired_t_test,
) -> ComparisonResult:
    """Paired comparison over common scored queries; raises if fewer than 2."""
    if not 0.0 < alpha < 1.0:
        raise EvaluationError(f"alpha must be in (0, 1), got {alpha}")
    if practical_margin < 0.0:
        raise EvaluationError(f"practical margin must be >= 0, got {practical_margin}")
    a = _as_scores(scores_a)
    b = _as_scores(scores_b)
    qids = common_queries(scores_a, scores_b, over)
    if len(qids) < 2:
        raise EvaluationError(f"paired comparison needs >= 2 common queries, got {len(qids)}")
    va = [a[q] for q in qids]
    vb = [b[q] for q in qids]
    t, p = test(va, vb)
    mean_a = math.fsum(va) / len(va)
    mean_b = math.fsum(vb) / len(vb)
    delta = mean_b - mean_a
    degenerate = math.isinf(t)
    label = classify(p, delta, alpha, practical_margin)
    if degenerate:
        label = OutcomeLabel(label.outcome, label.note + " [degenerate variance]")
    return ComparisonResult(
        mean_a=mean_a,
        mean_b=mean_b,
        n=len(qids),
        t_statistic=t,
        p_value=p,
        practical_delta=delta,
        outcome=label,
        degenerate_variance=degenerate,
    )


def robustness_check(
    scores_a: "PerQueryScores | ScoreMap",
    scores_b: "PerQueryScores | ScoreMap",
    slice_ids,
    alpha: float = DEFAULT_ALPHA,
    min_slice_size: int = DEFAULT_MIN_SLICE_SIZE,
) -> tuple[OutcomeLabel, ComparisonResult | None]:
    """Guardrail check on a slice: only a significant loss matters.

    Slices with fewer paired queries than the configured minimum yield a
    tie flagged as insufficient data rather than a confident outcome.
    """
    qids = common_queries(scores_a, scores_b, slice_ids)
    if not qids:
        raise EvaluationError("empty slice after skip-filtering")
    if len(qids) < max(2, min_slice_size):
        note = f"insufficient data: {len(qids)} paired queries < minimum {min_slice_size}"
        comparison = None
        if len(qids) >= 2:
            comparison = compare(scores_a, scores_b, alpha=alpha, over=qids)
        return OutcomeLabel(Outcome.TIE, note), comparison
    comparison = compare(scores_a, scores_b, alpha=alpha, practical_margin=0.0, over=qids)
    return comparison.outcome, comparison
