import random

import pytest

from retdecide.errors import EvaluationError
from retdecide.guardrails import check_margin, margin_regressions, run_guardrail
from retdecide.metrics import MetricSpec, PerQueryScores
from retdecide.outcomes import Outcome
from retdecide.slicing import QuerySlice

from reference import ref_t_two_sided_p


def scores_of(values: dict[str, float], system_id: str = "sys") -> PerQueryScores:
    return PerQueryScores(system_id=system_id, metric=MetricSpec("ndcg", 10), scores=values)


def slice_of(ids, name="slice") -> QuerySlice:
    return QuerySlice(name=name, query_ids=frozenset(ids), selector={"rule": "test"}, system_independent=True)


class TestRunGuardrail:
    def test_candidate_at_least_as_good_never_fails(self):
        rng = random.Random(2)
        base = {f"q{i}": rng.random() * 0.5 for i in range(60)}
        cand = {q: min(1.0, v + rng.random() * 0.3) for q, v in base.items()}
        report = run_guardrail("C-Length", slice_of(base), scores_of(base), scores_of(cand))
        assert report.outcome.outcome in (Outcome.WIN, Outcome.TIE)
        assert report.slice_size == 60

    def test_planted_failure_bin_reports_loss(self):
        rng = random.Random(3)
        base = {f"q{i}": 0.5 + rng.random() * 0.4 for i in range(80)}
        cand = {q: (0.0 if i < 40 else base[q] + 0.1) for i, q in enumerate(sorted(base))}
        failing = set(sorted(base)[:40])
        report = run_guardrail("C-Frequency", slice_of(failing), scores_of(base), scores_of(cand))
        assert report.outcome.outcome is Outcome.LOSS
        assert report.comparison.p_value < 0.05
        # oracle confirmation of the t-test on the slice
        assert abs(
            report.comparison.p_value - ref_t_two_sided_p(report.comparison.t_statistic, report.comparison.n - 1)
        ) <= 1e-6

    def test_small_slice_gives_insufficient_data_tie(self):
        base = {f"q{i}": 1.0 for i in range(10)}
        cand = {f"q{i}": 0.0 for i in range(10)}
        report = run_guardrail("C-Tiny", slice_of(base), scores_of(base), scores_of(cand), min_slice_size=20)
        assert report.outcome.outcome is Outcome.TIE
        assert "insufficient" in report.outcome.note

    def test_empty_slice_after_skips_is_error(self):
        base = {"q1": 1.0}
        cand = {"q2": 1.0}  # no overlap
        with pytest.raises(EvaluationError, match="empty"):
            run_guardrail("C-X", slice_of({"q1", "q2"}), scores_of(base), scores_of(cand))

    def test_skipped_count(self):
        base = {f"q{i}": 0.5 for i in range(30)}
        cand = dict(base)
        del cand["q0"], cand["q1"]
        report = run_guardrail("C-S", slice_of(base), scores_of(base), scores_of(cand))
        assert report.slice_size == 28
        assert report.skipped_count == 2


class TestMargin:
    def test_direct_count(self):
        a = {"q1": 1.0, "q2": 1.0, "q3": 0.0, "q4": 1.0}
        b = {"q1": 0.0, "q2": 1.0, "q3": 0.0, "q4": 1.0}
        report = margin_regressions(a, b, 1.0)
        assert report.regressed_query_ids == {"q1"}
        assert report.regressed_fraction == 0.25

    def test_maximal_margin_on_rr_scores(self):
        # delta = 1 only counts total flips: baseline RR 1.0, candidate RR 0.0
        a = {"q1": 1.0, "q2": 1.0, "q3": 0.5}
        b = {"q1": 0.0, "q2": 0.5, "q3": 0.0}
        report = margin_regressions(a, b, 1.0)
        assert report.regressed_query_ids == {"q1"}

    def test_planted_fraction_exact(self):
        a = {f"q{i}": 1.0 for i in range(10_000)}
        b = {f"q{i}": 1.0 for i in range(10_000)}
        for i in range(97):
            b[f"q{i}"] = 0.0
        report = margin_regressions(a, b, 1.0)
        assert report.regressed_fraction == 0.0097
        assert len(report.regressed_query_ids) == 97

    def test_fraction_monotone_in_delta(self):
        rng = random.Random(5)
        a = {f"q{i}": rng.random() for i in range(500)}
        b = {f"q{i}": rng.random() for i in range(500)}
        fractions = [margin_regressions(a, b, d).regressed_fraction for d in (0.1, 0.3, 0.5, 0.9, 1.0)]
        assert fractions == sorted(fractions, reverse=True)

    def test_invalid_delta(self):
        with pytest.raises(EvaluationError):
            margin_regressions({"q": 1.0}, {"q": 0.0}, 0.0)
        with pytest.raises(EvaluationError):
            margin_regressions({"q": 1.0}, {"q": 0.0}, 1.5)

    def test_empty_common_set_is_error(self):
        with pytest.raises(EvaluationError):
            margin_regressions({"a": 1.0}, {"b": 1.0}, 1.0)


class TestCheckMargin:
    def passing_report(self, fraction_num, total):
        a = {f"q{i}": 1.0 for i in range(total)}
        b = {f"q{i}": (0.0 if i < fraction_num else 1.0) for i in range(total)}
        return margin_regressions(a, b, 1.0)

    def test_point_below_threshold_passes(self):
        report = check_margin(self.passing_report(97, 10_000), 0.01)
        assert report.outcome.outcome is Outcome.TIE  # never a win, just not a loss

    def test_point_above_threshold_fails(self):
        report = check_margin(self.passing_report(187, 10_000), 0.01)
        assert report.outcome.outcome is Outcome.LOSS

    def test_zero_fraction_passes_any_threshold(self):
        report = self.passing_report(0, 100)
        assert check_margin(report, 0.0).outcome.outcome is Outcome.TIE

    def test_monotone_in_threshold(self):
        report = self.passing_report(5, 100)  # fraction 0.05
        outcomes = [check_margin(report, t).outcome.outcome for t in (0.01, 0.04, 0.05, 0.06, 0.2)]
        # once it passes at some threshold it passes at every larger one
        first_pass = outcomes.index(Outcome.TIE)
        assert all(o is Outcome.TIE for o in outcomes[first_pass:])
        assert all(o is Outcome.LOSS for o in outcomes[:first_pass])
        # boundary: fraction == threshold is not a violation
        assert check_margin(report, 0.05).outcome.outcome is Outcome.TIE


def test_full_set_guardrail_agrees_with_primary_comparison():
    rng = random.Random(9)
    a = {f"q{i}": rng.random() for i in range(200)}
    b = {q: max(0.0, v - 0.2 - 0.1 * rng.random()) for q, v in a.items()}
    from retdecide.significance import compare

    primary = compare(a, b, alpha=0.05, practical_margin=0.0)
    report = run_guardrail("C-Full", slice_of(a), scores_of(a), scores_of(b), alpha=0.05)
    assert primary.outcome.outcome is Outcome.LOSS
    assert report.outcome.outcome is Outcome.LOSS
    assert report.comparison.p_value == primary.p_value
