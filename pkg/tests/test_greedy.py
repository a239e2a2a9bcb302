"""Greedy cohort construction: eager/lazy equivalence, traces, determinism."""

import itertools
import random
from fractions import Fraction

import pytest

from spfkit import (
    Applicant,
    ApplicantPool,
    DiversitySpec,
    GreedyStats,
    PerformanceSpec,
    ProportionalTarget,
    ScalarizationGrid,
    SelectionConstraints,
    blend_objective,
    diversity_fraction,
    evaluate_cohort,
    greedy_cohort,
    lazy_greedy_cohort,
    performance_fraction,
)
from spfkit.errors import PoolTooSmallError

from .instances import random_pool, random_spec

PSPEC = PerformanceSpec()
PARITY = ProportionalTarget("gender", frozenset({"female", "non_binary"}), 0.5)


def small_pool():
    return ApplicantPool(
        [
            Applicant("a", 0.9, {"gender": "male"}),
            Applicant("b", 0.5, {"gender": "male"}),
            Applicant("c", 0.2, {"gender": "female"}),
            Applicant("d", 0.1, {"gender": "female"}),
        ],
        {"gender": frozenset({"male", "female"})},
    )


def test_pure_performance_picks_top_k():
    cohort, trace = greedy_cohort(
        small_pool(), DiversitySpec(proportional=(PARITY,)), PSPEC,
        SelectionConstraints(cohort_size=2), alpha=1.0,
    )
    assert cohort.ids == ("a", "b")
    assert [p.id for p in trace.picks] == ["a", "b"]


def test_pure_diversity_parity_tiebreak():
    # brute force over all 6 pairs confirms any pair with a female member
    # maximizes F at alpha=0; ties resolve to the smallest ids: c then a
    pool = small_pool()
    dspec = DiversitySpec(proportional=(PARITY,))
    cohort, trace = greedy_cohort(
        pool, dspec, PSPEC, SelectionConstraints(cohort_size=2), alpha=0.0
    )
    assert cohort.ids == ("a", "c")
    assert [p.id for p in trace.picks] == ["c", "a"]
    best = max(
        blend_objective(0.0, *evaluate_cohort(pool, dspec, PSPEC, pair, 2))
        for pair in itertools.combinations(pool.ids, 2)
    )
    assert trace.final_f == best


def test_all_pinned_degenerate():
    pool = small_pool()
    cohort, trace = greedy_cohort(
        pool, DiversitySpec(proportional=(PARITY,)), PSPEC,
        SelectionConstraints(cohort_size=2, pinned={"b", "d"}), alpha=0.5,
    )
    assert cohort.ids == ("b", "d")
    assert trace.picks == ()


def test_pinned_contained_excluded_absent():
    rng = random.Random(3)
    for _ in range(25):
        pool = random_pool(rng, 12)
        dspec = random_spec(rng)
        ids = list(pool.ids)
        pinned = frozenset(rng.sample(ids, 2))
        remaining = [i for i in ids if i not in pinned]
        excluded = frozenset(rng.sample(remaining, 2))
        constraints = SelectionConstraints(cohort_size=5, pinned=pinned, excluded=excluded)
        cohort, trace = lazy_greedy_cohort(pool, dspec, PSPEC, constraints, rng.random())
        assert pinned <= cohort.id_set
        assert not (excluded & cohort.id_set)
        assert len(trace.picks) == 5 - len(pinned)


def test_trace_f_values_monotone_and_replayable():
    rng = random.Random(11)
    for _ in range(20):
        pool = random_pool(rng, 10)
        dspec = random_spec(rng)
        alpha = rng.random()
        alpha_frac = Fraction(alpha)
        constraints = SelectionConstraints(cohort_size=4)
        cohort, trace = greedy_cohort(pool, dspec, PSPEC, constraints, alpha)

        def exact_f(ids):
            return alpha_frac * performance_fraction(pool, PSPEC, ids, 4) + (
                1 - alpha_frac
            ) * diversity_fraction(pool, dspec, ids, 4)

        members: list[str] = []
        prev_f = 0.0
        prev_exact = Fraction(0)
        for pick in trace.picks:
            members.append(pick.id)
            p, d = evaluate_cohort(pool, dspec, PSPEC, members, 4)
            f = blend_objective(alpha, p, d)
            assert f == pick.f_value  # exact replay through the canonical evaluators
            assert f >= prev_f
            exact = exact_f(members)
            assert pick.gain == float(exact - prev_exact)
            assert pick.gain >= 0.0
            prev_f, prev_exact = f, exact
        assert trace.final_f == prev_f
        assert blend_objective(alpha, cohort.performance, cohort.diversity) == trace.final_f


def test_deterministic_across_runs():
    rng = random.Random(5)
    pool = random_pool(rng, 30)
    dspec = random_spec(rng)
    constraints = SelectionConstraints(cohort_size=6)
    a = greedy_cohort(pool, dspec, PSPEC, constraints, 0.37)
    b = greedy_cohort(pool, dspec, PSPEC, constraints, 0.37)
    assert a == b


def test_lazy_equals_eager_on_random_instances():
    rng = random.Random(23)
    for _ in range(40):
        pool = random_pool(rng, rng.randint(6, 18))
        dspec = random_spec(rng)
        k = rng.randint(2, 5)
        constraints = SelectionConstraints(cohort_size=k)
        for alpha in (0.0, rng.random(), 1.0):
            eager = greedy_cohort(pool, dspec, PSPEC, constraints, alpha)
            lazy = lazy_greedy_cohort(pool, dspec, PSPEC, constraints, alpha)
            assert eager == lazy


def test_lazy_uses_strictly_fewer_evaluations():
    rng = random.Random(9)
    pool = random_pool(rng, 200)
    dspec = random_spec(rng)
    constraints = SelectionConstraints(cohort_size=20)
    eager_stats, lazy_stats = GreedyStats(), GreedyStats()
    eager = greedy_cohort(pool, dspec, PSPEC, constraints, 0.5, stats=eager_stats)
    lazy = lazy_greedy_cohort(pool, dspec, PSPEC, constraints, 0.5, stats=lazy_stats)
    assert eager == lazy
    assert lazy_stats.evaluations < eager_stats.evaluations


def test_lazy_alpha_one_descending_scores():
    rng = random.Random(2)
    pool = random_pool(rng, 40)
    dspec = random_spec(rng)
    cohort, trace = lazy_greedy_cohort(
        pool, dspec, PSPEC, SelectionConstraints(cohort_size=8), 1.0
    )
    picked_scores = [pool[p.id].score for p in trace.picks]
    assert picked_scores == sorted(picked_scores, reverse=True)


def test_pool_too_small():
    pool = small_pool()
    with pytest.raises(PoolTooSmallError):
        greedy_cohort(
            pool, DiversitySpec(proportional=(PARITY,)), PSPEC,
            SelectionConstraints(cohort_size=3, excluded={"a", "b"}), 0.5,
        )


def test_scalarization_grid():
    grid = ScalarizationGrid(steps=4)
    assert grid.alphas() == [0.0, 0.25, 0.5, 0.75, 1.0]
    with pytest.raises(ValueError):
        ScalarizationGrid(steps=0)


def test_alpha_bounds():
    pool = small_pool()
    dspec = DiversitySpec(proportional=(PARITY,))
    with pytest.raises(ValueError):
        greedy_cohort(pool, dspec, PSPEC, SelectionConstraints(cohort_size=2), 1.5)
