"""Frontier assembly and Pareto-gap diagnostics.

A frontier is built by sweeping the scalarization weight across a grid,
running the greedy optimizer at each weight, and keeping only cohorts that
survive two filters:

* **Pareto filter**: drop any point weakly dominated by another (worse or
  equal on both axes, strictly worse on at least one). Duplicates keep
  their first occurrence.
* **Convex upper filter**: drop points strictly below the chord of their
  neighbors, leaving the concave upper-left envelope. Points exactly on a
  chord stay; endpoints always stay.

Gap diagnostics treat the filtered frontier as a piecewise-linear curve
d = f(p) between adjacent points and measure how far inside the curve an
actual cohort sits: the diversity available at equal performance and the
performance available at equal diversity. Beyond the curve's span, f
extends flat from the nearest endpoint, so no gain is ever reported that
the optimizer never demonstrated.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence, TypeVar

import numpy as np

from .diversity import DiversitySpec
from .errors import EmptyFrontierError, SizeMismatchError
from .formats import constraints_to_doc, pool_fingerprint, specs_fingerprint
from .greedy import (
    GreedyTrace,
    ScalarizationGrid,
    evaluate_cohort,
    greedy_cohort,
    lazy_greedy_cohort,
)
from .performance import PerformanceSpec
from .pool import ApplicantPool, Cohort, SelectionConstraints

PointT = TypeVar("PointT", bound=tuple)


@dataclass(frozen=True)
class FrontierPoint:
    """One frontier cohort and its exact, recomputable (performance, diversity)."""

    alpha: float | None
    performance: float
    diversity: float
    cohort_ids: tuple[str, ...]


@dataclass(frozen=True)
class Provenance:
    """What the frontier was computed from, plus the unfiltered points for audit."""

    pool_hash: str
    spec_hash: str
    k: int
    steps: int
    constraints: dict
    raw_points: tuple[FrontierPoint, ...]


@dataclass(frozen=True)
class Frontier:
    """Mutually non-dominated points sorted by performance ascending."""

    points: tuple[FrontierPoint, ...]
    provenance: Provenance

    def curve(self) -> list[tuple[float, float]]:
        return [(pt.performance, pt.diversity) for pt in self.points]


@dataclass(frozen=True)
class ParetoGapReport:
    """How far inside the frontier an actual cohort sits, on each axis.

    Relative gains divide by the actual cohort's own value ("x% more
    diverse than it was"); they are None when that value is zero and the
    absolute gain is not.
    """

    actual_ids: tuple[str, ...]
    actual_performance: float
    actual_diversity: float
    diversity_gain_abs: float
    diversity_gain_rel: float | None
    performance_gain_abs: float
    performance_gain_rel: float | None


def pareto_filter(points: Sequence[PointT]) -> list[PointT]:
    """Keep exactly the points not weakly dominated by another kept point.

    ``points`` are tuples whose first two elements are (performance,
    diversity); any payload elements ride along. Exact duplicates keep the
    first occurrence, and output preserves input order.
    """
    n = len(points)
    if n <= 1:
        return list(points)
    p = np.fromiter((pt[0] for pt in points), dtype=float, count=n)
    d = np.fromiter((pt[1] for pt in points), dtype=float, count=n)
    # Primary p descending, secondary d descending, stable on input index.
    order = np.lexsort((-d, -p))
    d_sorted = d[order]
    running = np.maximum.accumulate(d_sorted)
    prev_best = np.concatenate(([-np.inf], running[:-1]))
    kept_sorted = d_sorted > prev_best
    kept_indices = np.sort(order[kept_sorted])
    return [points[i] for i in kept_indices]


def _cross(a: tuple[float, float], b: tuple[float, float], c: tuple[float, float]) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def convex_upper_filter(points: Sequence[PointT]) -> list[PointT]:
    """Keep the concave upper envelope of already Pareto-filtered points.

    Input may arrive in any order; it is sorted by performance first.
    A point is dropped only when strictly below the chord joining its
    hull neighbors, so collinear points survive.
    """
    pts = sorted(points, key=lambda pt: pt[0])
    if len(pts) <= 2:
        return pts
    hull: list[PointT] = []
    for pt in pts:
        while len(hull) >= 2 and _cross(
            (hull[-2][0], hull[-2][1]), (hull[-1][0], hull[-1][1]), (pt[0], pt[1])
        ) > 0.0:
            hull.pop()
        hull.append(pt)
    return hull


def interpolate_diversity(curve: Sequence[tuple[float, float]], p: float) -> float:
    """d = f(p) on the piecewise-linear frontier, flat beyond the endpoints.

    ``curve`` is sorted by performance ascending with strictly descending
    diversity. Exact knots return the stored diversity with no arithmetic.
    """
    if not curve:
        raise EmptyFrontierError("cannot interpolate an empty frontier")
    if p <= curve[0][0]:
        return curve[0][1]
    if p >= curve[-1][0]:
        return curve[-1][1]
    for (p0, d0), (p1, d1) in zip(curve, curve[1:]):
        if p == p1:
            return d1
        if p0 < p < p1:
            t = (p - p0) / (p1 - p0)
            return d0 + t * (d1 - d0)
    raise AssertionError("unreachable: p inside curve span but no segment found")


def interpolate_performance(curve: Sequence[tuple[float, float]], d: float) -> float:
    """p = f^-1(d), the inverse of :func:`interpolate_diversity`."""
    if not curve:
        raise EmptyFrontierError("cannot interpolate an empty frontier")
    if d >= curve[0][1]:
        return curve[0][0]
    if d <= curve[-1][1]:
        return curve[-1][0]
    for (p0, d0), (p1, d1) in zip(curve, curve[1:]):
        if d == d1:
            return p1
        if d0 > d > d1:
            t = (d0 - d) / (d0 - d1)
            return p0 + t * (p1 - p0)
    raise AssertionError("unreachable: d inside curve span but no segment found")


def build_frontier(
    pool: ApplicantPool,
    dspec: DiversitySpec,
    pspec: PerformanceSpec,
    constraints: SelectionConstraints,
    grid: ScalarizationGrid,
    *,
    lazy: bool = True,
    threads: int = 1,
) -> Frontier:
    """Sweep the scalarization grid, filter, and assemble the frontier.

    Greedy runs for different weights are independent; ``threads`` > 1 (or
    0 for automatic) fans them out. Results are assembled in grid order,
    so the outcome does not depend on scheduling.
    """
    run = lazy_greedy_cohort if lazy else greedy_cohort
    alphas = grid.alphas()

    def solve(alpha: float) -> tuple[Cohort, GreedyTrace]:
        return run(pool, dspec, pspec, constraints, alpha)

    if threads == 1:
        results = [solve(a) for a in alphas]
    else:
        workers = threads if threads > 0 else None
        with ThreadPoolExecutor(max_workers=workers) as pool_exec:
            results = list(pool_exec.map(solve, alphas))

    raw: list[FrontierPoint] = []
    for alpha, (cohort, _trace) in zip(alphas, results):
        raw.append(
            FrontierPoint(
                alpha=alpha,
                performance=cohort.performance,
                diversity=cohort.diversity,
                cohort_ids=cohort.ids,
            )
        )

    unique: list[tuple[float, float, FrontierPoint]] = []
    seen: set[frozenset[str]] = set()
    for point in raw:
        key = frozenset(point.cohort_ids)
        if key not in seen:
            seen.add(key)
            unique.append((point.performance, point.diversity, point))

    surviving = pareto_filter(unique)
    surviving.sort(key=lambda row: row[0])
    surviving = convex_upper_filter(surviving)
    points = tuple(row[2] for row in surviving)

    provenance = Provenance(
        pool_hash=pool_fingerprint(pool),
        spec_hash=specs_fingerprint(dspec, pspec),
        k=constraints.cohort_size,
        steps=grid.steps,
        constraints=constraints_to_doc(constraints),
        raw_points=tuple(raw),
    )
    return Frontier(points=points, provenance=provenance)


def pareto_gap(
    pool: ApplicantPool,
    frontier: Frontier,
    actual_ids: Iterable[str],
    dspec: DiversitySpec,
    pspec: PerformanceSpec,
    k: int,
) -> ParetoGapReport:
    """Measure the actual cohort's distance to the frontier on each axis."""
    if not frontier.points:
        raise EmptyFrontierError("gap analysis needs a non-empty frontier")
    ids = tuple(sorted(set(actual_ids)))
    if len(ids) != k:
        raise SizeMismatchError(f"actual cohort has {len(ids)} distinct ids, expected k={k}")
    actual_p, actual_d = evaluate_cohort(pool, dspec, pspec, ids, k)
    curve = frontier.curve()
    div_gain = max(0.0, interpolate_diversity(curve, actual_p) - actual_d)
    perf_gain = max(0.0, interpolate_performance(curve, actual_d) - actual_p)
    return ParetoGapReport(
        actual_ids=ids,
        actual_performance=actual_p,
        actual_diversity=actual_d,
        diversity_gain_abs=div_gain,
        diversity_gain_rel=_relative(div_gain, actual_d),
        performance_gain_abs=perf_gain,
        performance_gain_rel=_relative(perf_gain, actual_p),
    )


def _relative(gain: float, base: float) -> float | None:
    if gain == 0.0:
        return 0.0
    return gain / base if base > 0.0 else None
