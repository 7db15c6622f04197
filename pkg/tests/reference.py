"""Independent brute-force reference implementations used as test oracles.

Everything here is written for obviousness, not speed, and deliberately
shares no code with the package under test.
"""

from __future__ import annotations

import math
import random

import mpmath


# --- naive rank metrics -------------------------------------------------

def ref_ndcg(ranking: list[str], grades: dict[str, int], k: int) -> float | None:
    gains = []
    for position, doc in enumerate(ranking):
        if position >= k:
            break
        grade = grades[doc] if doc in grades else 0
        gains.append((2.0**grade - 1.0) / math.log2(position + 2))
    dcg = 0.0
    for g in gains:
        dcg += g
    best = sorted(grades.values())[::-1]
    idcg = 0.0
    for position, grade in enumerate(best):
        if position >= k:
            break
        idcg += (2.0**grade - 1.0) / math.log2(position + 2)
    if idcg == 0.0:
        return None
    return dcg / idcg


def ref_rr(ranking: list[str], grades: dict[str, int], k: int, threshold: int) -> float | None:
    if not [d for d, g in grades.items() if g >= threshold]:
        return None
    for position, doc in enumerate(ranking):
        if position >= k:
            break
        if doc in grades and grades[doc] >= threshold:
            return 1.0 / (position + 1)
    return 0.0


def ref_recall(ranking: list[str], grades: dict[str, int], k: int, threshold: int) -> float | None:
    relevant = [d for d, g in grades.items() if g >= threshold]
    if not relevant:
        return None
    found = 0
    for doc in relevant:
        if doc in ranking[:k]:
            found += 1
    return found / len(relevant)


def ref_precision(ranking: list[str], grades: dict[str, int], k: int, threshold: int) -> float | None:
    relevant = [d for d, g in grades.items() if g >= threshold]
    if not relevant:
        return None
    found = 0
    for doc in ranking[:k]:
        if doc in relevant:
            found += 1
    return found / k


# --- quadrature oracle for the paired t-test ----------------------------

def ref_t_two_sided_p(t: float, df: int, dps: int = 30) -> float:
    """P(|T| >= |t|) by direct numerical integration of the t density."""
    with mpmath.workdps(dps):
        df_m = mpmath.mpf(df)
        norm = mpmath.gamma((df_m + 1) / 2) / (mpmath.sqrt(df_m * mpmath.pi) * mpmath.gamma(df_m / 2))

        def pdf(x):
            return norm * (1 + x * x / df_m) ** (-(df_m + 1) / 2)

        tail = mpmath.quad(pdf, [abs(t), mpmath.inf])
        return float(2 * tail)


def ref_paired_p(a: list[float], b: list[float]) -> float:
    """Quadrature p for the paired test, recomputing t from scratch."""
    n = len(a)
    d = [y - x for x, y in zip(a, b)]
    mean = sum(d) / n
    ss = sum((x - mean) ** 2 for x in d)
    sd = math.sqrt(ss / (n - 1))
    if sd == 0.0:
        return 1.0 if mean == 0.0 else 0.0
    t = mean / (sd / math.sqrt(n))
    return ref_t_two_sided_p(t, n - 1)


# --- O(n^2) pareto dominance --------------------------------------------

def ref_pareto(values: list[tuple[float, ...]], maximize: tuple[bool, ...]) -> list[int]:
    """Indices of non-dominated rows under weak dominance with a strict part."""

    def dominates(x, y):
        at_least_as_good = True
        strictly_better = False
        for vx, vy, bigger in zip(x, y, maximize):
            better = vx > vy if bigger else vx < vy
            worse = vx < vy if bigger else vx > vy
            if worse:
                at_least_as_good = False
            if better:
                strictly_better = True
        return at_least_as_good and strictly_better

    keep = []
    for i, row in enumerate(values):
        if not any(dominates(other, row) for j, other in enumerate(values) if j != i):
            keep.append(i)
    return keep


# --- random instance generators -----------------------------------------

def random_ranking_case(rng: random.Random, max_docs: int = 120, max_grade: int = 3):
    """One query's ranking plus graded judgments, both random."""
    n_docs = rng.randint(1, max_docs)
    docs = [f"d{i}" for i in range(n_docs)]
    rng.shuffle(docs)
    grades = {}
    for doc in docs:
        if rng.random() < 0.35:
            grades[doc] = rng.randint(0, max_grade)
    # some judged docs never retrieved
    for extra in range(rng.randint(0, 5)):
        grades[f"x{extra}"] = rng.randint(0, max_grade)
    return docs, grades
