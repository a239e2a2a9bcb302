"""Frontier assembly, Pareto/convex filtering, and gap diagnostics."""

import itertools
import random

import pytest

from spfkit import (
    Applicant,
    ApplicantPool,
    DiversitySpec,
    PerformanceSpec,
    ProportionalTarget,
    ScalarizationGrid,
    SelectionConstraints,
    build_frontier,
    convex_upper_filter,
    evaluate_cohort,
    pareto_filter,
    pareto_gap,
)
from spfkit.errors import EmptyFrontierError, SizeMismatchError
from spfkit.frontier import (
    Frontier,
    FrontierPoint,
    Provenance,
    interpolate_diversity,
    interpolate_performance,
)

from .instances import random_pool, random_spec

PSPEC = PerformanceSpec()


class TestParetoFilter:
    def test_dominated_point_dropped(self):
        pts = [(0.5, 0.9), (0.7, 0.8), (0.6, 0.7)]
        assert pareto_filter(pts) == [(0.5, 0.9), (0.7, 0.8)]

    def test_single_point(self):
        assert pareto_filter([(0.3, 0.3)]) == [(0.3, 0.3)]

    def test_duplicates_keep_first_occurrence(self):
        a = (0.5, 0.5, "first")
        b = (0.5, 0.5, "second")
        assert pareto_filter([a, b]) == [a]

    def test_weak_domination_equal_axis(self):
        # equal diversity, lower performance: dominated
        assert pareto_filter([(0.5, 0.9), (0.4, 0.9)]) == [(0.5, 0.9)]
        assert pareto_filter([(0.4, 0.9), (0.5, 0.9)]) == [(0.5, 0.9)]

    def test_mutual_nondomination_pairwise(self):
        rng = random.Random(1)
        for _ in range(50):
            pts = [(rng.random(), rng.random()) for _ in range(rng.randint(1, 40))]
            kept = pareto_filter(pts)
            assert kept  # never empty
            for a, b in itertools.combinations(kept, 2):
                assert a[0] > b[0] or a[1] > b[1]
                assert b[0] > a[0] or b[1] > a[1]
            # anything dropped is weakly dominated by something kept
            for pt in pts:
                if pt not in kept:
                    assert any(
                        q[0] >= pt[0] and q[1] >= pt[1] and q[:2] != pt[:2] for q in kept
                    ) or pt in [p for p in pts if p in kept]

    def test_preserves_input_order(self):
        pts = [(0.9, 0.1), (0.1, 0.9), (0.5, 0.5)]
        assert pareto_filter(pts) == pts


class TestConvexUpperFilter:
    def test_point_below_chord_dropped(self):
        pts = [(0.0, 1.0), (0.5, 0.4), (1.0, 0.0)]
        assert convex_upper_filter(pts) == [(0.0, 1.0), (1.0, 0.0)]

    def test_point_above_chord_kept(self):
        pts = [(0.0, 1.0), (0.5, 0.6), (1.0, 0.0)]
        assert convex_upper_filter(pts) == pts

    def test_collinear_point_kept(self):
        pts = [(0.0, 1.0), (0.5, 0.5), (1.0, 0.0)]
        assert convex_upper_filter(pts) == pts

    def test_two_points_always_kept(self):
        pts = [(0.2, 0.9), (0.8, 0.1)]
        assert convex_upper_filter(pts) == pts

    def test_endpoints_always_survive(self):
        rng = random.Random(4)
        for _ in range(50):
            pts = sorted(
                pareto_filter([(rng.random(), rng.random()) for _ in range(20)])
            )
            kept = convex_upper_filter(pts)
            assert kept[0] == pts[0] and kept[-1] == pts[-1]

    def test_order_invariant_to_permutation(self):
        rng = random.Random(8)
        pts = sorted(pareto_filter([(rng.random(), rng.random()) for _ in range(30)]))
        expected = convex_upper_filter(pts)
        for _ in range(10):
            shuffled = pts[:]
            rng.shuffle(shuffled)
            assert convex_upper_filter(shuffled) == expected

    def test_result_is_concave(self):
        rng = random.Random(15)
        for _ in range(30):
            pts = sorted(pareto_filter([(rng.random(), rng.random()) for _ in range(25)]))
            kept = convex_upper_filter(pts)
            for (x0, y0), (x1, y1), (x2, y2) in zip(kept, kept[1:], kept[2:]):
                # middle point on or above the chord of its neighbors
                assert (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0) <= 0.0


def _frontier_from_pairs(pairs, k=2):
    points = tuple(
        FrontierPoint(alpha=None, performance=p, diversity=d, cohort_ids=("x", "y"))
        for p, d in pairs
    )
    prov = Provenance(
        pool_hash="h", spec_hash="s", k=k, steps=0, constraints={}, raw_points=()
    )
    return Frontier(points=points, provenance=prov)


class TestInterpolation:
    def test_gap_example_inside(self):
        curve = [(0.5, 1.0), (1.0, 0.5)]
        assert interpolate_diversity(curve, 0.5) == 1.0
        assert interpolate_performance(curve, 0.5) == 1.0
        # chord midpoint
        assert interpolate_diversity(curve, 0.75) == 0.75
        assert interpolate_performance(curve, 0.75) == 0.75

    def test_flat_extension(self):
        curve = [(0.5, 1.0), (1.0, 0.5)]
        assert interpolate_diversity(curve, 0.2) == 1.0
        assert interpolate_diversity(curve, 1.2) == 0.5
        assert interpolate_performance(curve, 1.5) == 0.5
        assert interpolate_performance(curve, 0.1) == 1.0

    def test_empty_curve(self):
        with pytest.raises(EmptyFrontierError):
            interpolate_diversity([], 0.5)


def build_gap_pool():
    # scores and genders chosen so frontiers are non-trivial
    apps = [
        Applicant("a", 0.95, {"gender": "male"}),
        Applicant("b", 0.85, {"gender": "male"}),
        Applicant("c", 0.75, {"gender": "male"}),
        Applicant("d", 0.40, {"gender": "female"}),
        Applicant("e", 0.30, {"gender": "female"}),
        Applicant("f", 0.20, {"gender": "female"}),
    ]
    return ApplicantPool(apps, {"gender": frozenset({"male", "female"})})


DSPEC = DiversitySpec(
    proportional=(ProportionalTarget("gender", frozenset({"female"}), 0.5),)
)


class TestParetoGap:
    def test_hand_derived_midpoint(self):
        frontier = _frontier_from_pairs([(0.5, 1.0), (1.0, 0.5)])
        pool = ApplicantPool(
            [Applicant("x", 0.5, {"gender": "male"}), Applicant("y", 0.5, {"gender": "male"})],
            {"gender": frozenset({"male"})},
        )
        report = pareto_gap(pool, frontier, ["x", "y"], DSPEC_TRIVIAL, PSPEC, 2)
        # actual = (0.5, 0.0): f(0.5) = 1.0, f_inv(0.0) = 1.0
        assert report.actual_performance == 0.5
        assert report.diversity_gain_abs == 1.0
        assert report.performance_gain_abs == 0.5
        assert report.performance_gain_rel == 1.0
        assert report.diversity_gain_rel is None  # actual diversity is zero

    def test_hand_derived_symmetric_gains(self):
        # actual (0.5, 0.5) against the chord from (0.5, 1.0) to (1.0, 0.5):
        # both axes can improve by 0.5, i.e. 100% relative
        frontier = _frontier_from_pairs([(0.5, 1.0), (1.0, 0.5)])
        pool = ApplicantPool(
            [
                Applicant("x", 0.5, {"gender": "female"}),
                Applicant("y", 0.5, {"gender": "male"}),
            ],
            {"gender": frozenset({"male", "female"})},
        )
        dspec = DiversitySpec(
            proportional=(ProportionalTarget("gender", frozenset({"female"}), 1.0),)
        )
        report = pareto_gap(pool, frontier, ["x", "y"], dspec, PSPEC, 2)
        assert (report.actual_performance, report.actual_diversity) == (0.5, 0.5)
        assert report.diversity_gain_abs == 0.5
        assert report.diversity_gain_rel == 1.0
        assert report.performance_gain_abs == 0.5
        assert report.performance_gain_rel == 1.0

    def test_on_chord_point_has_zero_gap(self):
        # actual (0.75, 0.75) sits exactly on the chord: no gain either way
        frontier = _frontier_from_pairs([(0.5, 1.0), (1.0, 0.5)])
        pool = ApplicantPool(
            [
                Applicant("x", 0.75, {"gender": "female"}),
                Applicant("y", 0.75, {"gender": "male"}),
            ],
            {"gender": frozenset({"male", "female"})},
        )
        dspec = DiversitySpec(
            proportional=(
                ProportionalTarget("gender", frozenset({"female"}), 0.5),  # met: 1.0
                ProportionalTarget("gender", frozenset({"male"}), 1.0),  # half: 0.5
            )
        )
        report = pareto_gap(pool, frontier, ["x", "y"], dspec, PSPEC, 2)
        assert (report.actual_performance, report.actual_diversity) == (0.75, 0.75)
        assert report.diversity_gain_abs == 0.0
        assert report.performance_gain_abs == 0.0

    def test_frontier_cohort_has_zero_gap(self):
        pool = build_gap_pool()
        frontier = build_frontier(
            pool, DSPEC, PSPEC, SelectionConstraints(cohort_size=3), ScalarizationGrid(10)
        )
        for pt in frontier.points:
            report = pareto_gap(pool, frontier, pt.cohort_ids, DSPEC, PSPEC, 3)
            assert report.diversity_gain_abs == 0.0
            assert report.performance_gain_abs == 0.0
            assert report.diversity_gain_rel == 0.0
            assert report.performance_gain_rel == 0.0

    def test_interior_cohort_has_nonnegative_gains(self):
        pool = build_gap_pool()
        frontier = build_frontier(
            pool, DSPEC, PSPEC, SelectionConstraints(cohort_size=3), ScalarizationGrid(10)
        )
        for ids in itertools.combinations(pool.ids, 3):
            report = pareto_gap(pool, frontier, ids, DSPEC, PSPEC, 3)
            assert report.diversity_gain_abs >= 0.0
            assert report.performance_gain_abs >= 0.0

    def test_size_mismatch(self):
        pool = build_gap_pool()
        frontier = build_frontier(
            pool, DSPEC, PSPEC, SelectionConstraints(cohort_size=3), ScalarizationGrid(2)
        )
        with pytest.raises(SizeMismatchError):
            pareto_gap(pool, frontier, ["a", "b"], DSPEC, PSPEC, 3)

    def test_empty_frontier(self):
        frontier = Frontier(
            points=(),
            provenance=Provenance("h", "s", 2, 0, {}, ()),
        )
        pool = build_gap_pool()
        with pytest.raises(EmptyFrontierError):
            pareto_gap(pool, frontier, ["a", "b"], DSPEC, PSPEC, 2)


DSPEC_TRIVIAL = DiversitySpec(
    proportional=(ProportionalTarget("gender", frozenset({"female"}), 0.5),)
)


class TestBuildFrontier:
    def test_degenerate_grid_two_points_max(self):
        pool = build_gap_pool()
        frontier = build_frontier(
            pool, DSPEC, PSPEC, SelectionConstraints(cohort_size=3), ScalarizationGrid(1)
        )
        assert 1 <= len(frontier.points) <= 2
        assert len(frontier.provenance.raw_points) == 2

    def test_single_point_when_one_cohort_wins_both(self):
        # one applicant set maximizes performance and diversity simultaneously
        apps = [
            Applicant("a", 0.9, {"gender": "female"}),
            Applicant("b", 0.8, {"gender": "male"}),
            Applicant("c", 0.1, {"gender": "male"}),
            Applicant("d", 0.05, {"gender": "male"}),
        ]
        pool = ApplicantPool(apps, {"gender": frozenset({"male", "female"})})
        frontier = build_frontier(
            pool, DSPEC, PSPEC, SelectionConstraints(cohort_size=2), ScalarizationGrid(10)
        )
        assert len(frontier.points) == 1
        assert frontier.points[0].cohort_ids == ("a", "b")

    def test_points_sorted_and_strictly_tradeoff(self):
        rng = random.Random(21)
        for _ in range(15):
            pool = random_pool(rng, 14)
            dspec = random_spec(rng)
            frontier = build_frontier(
                pool, dspec, PSPEC, SelectionConstraints(cohort_size=4), ScalarizationGrid(8)
            )
            pts = frontier.points
            assert len(pts) >= 1
            for a, b in zip(pts, pts[1:]):
                assert a.performance < b.performance
                assert a.diversity > b.diversity

    def test_points_recomputable_exactly(self):
        rng = random.Random(22)
        pool = random_pool(rng, 16)
        dspec = random_spec(rng)
        frontier = build_frontier(
            pool, dspec, PSPEC, SelectionConstraints(cohort_size=5), ScalarizationGrid(10)
        )
        for pt in frontier.points:
            p, d = evaluate_cohort(pool, dspec, PSPEC, pt.cohort_ids, 5)
            assert (p, d) == (pt.performance, pt.diversity)

    def test_threaded_build_matches_serial(self):
        rng = random.Random(30)
        pool = random_pool(rng, 20)
        dspec = random_spec(rng)
        c = SelectionConstraints(cohort_size=5)
        serial = build_frontier(pool, dspec, PSPEC, c, ScalarizationGrid(6), threads=1)
        threaded = build_frontier(pool, dspec, PSPEC, c, ScalarizationGrid(6), threads=4)
        assert serial == threaded

    def test_eager_matches_lazy_build(self):
        rng = random.Random(31)
        pool = random_pool(rng, 15)
        dspec = random_spec(rng)
        c = SelectionConstraints(cohort_size=4)
        a = build_frontier(pool, dspec, PSPEC, c, ScalarizationGrid(5), lazy=True)
        b = build_frontier(pool, dspec, PSPEC, c, ScalarizationGrid(5), lazy=False)
        assert a == b
