"""Exhaustive enumeration of all size-k cohorts, for verifying the greedy path.

Enumeration cost is C(n, k), so a hard budget guards every operation; there
is deliberately no sampling fallback, because a sampled check certifies
nothing. The enumerators call the same scorers as the optimizer, while
:func:`naive_cohort_scores` is an intentionally separate re-implementation
(plain loops, exact rational score sums) used by tests to catch bugs in the
incremental counter path.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .diversity import DiversitySpec
from .errors import BudgetExceededError, PoolTooSmallError
from .formats import pool_fingerprint, specs_fingerprint
from .frontier import Frontier, FrontierPoint, Provenance, pareto_filter
from .greedy import blend_objective, evaluate_cohort
from .performance import PerformanceSpec
from .pool import UNKNOWN, ApplicantPool

#: Default cap on C(n, k).
DEFAULT_BUDGET = 10_000_000


@dataclass(frozen=True)
class ExactResult:
    """Exact maximum of the blended objective over every size-k cohort."""

    opt_f: float
    opt_cohorts: tuple[tuple[str, ...], ...]
    enumerated_count: int


def _check_budget(pool: ApplicantPool, k: int, budget: int) -> int:
    n = len(pool)
    if n < k:
        raise PoolTooSmallError(f"pool has {n} applicants, need k={k}")
    count = math.comb(n, k)
    if count > budget:
        raise BudgetExceededError(
            f"C({n},{k}) = {count} cohorts exceeds enumeration budget {budget}"
        )
    return count


def enumerate_cohort_scores(
    pool: ApplicantPool,
    dspec: DiversitySpec,
    pspec: PerformanceSpec,
    k: int,
    budget: int = DEFAULT_BUDGET,
) -> list[tuple[float, float, tuple[str, ...]]]:
    """(performance, diversity, sorted ids) for every size-k cohort, in lexicographic combination order."""
    _check_budget(pool, k, budget)
    dspec.validate_against(pool)
    ids = pool.ids
    out = []
    for combo in itertools.combinations(ids, k):
        member_ids = tuple(sorted(combo))
        p, d = evaluate_cohort(pool, dspec, pspec, member_ids, k)
        out.append((p, d, member_ids))
    return out


def exact_opt(
    pool: ApplicantPool,
    dspec: DiversitySpec,
    pspec: PerformanceSpec,
    k: int,
    alpha: float,
    budget: int = DEFAULT_BUDGET,
) -> ExactResult:
    """Exact maximum of alpha * P + (1 - alpha) * D, with every maximizing cohort."""
    scored = enumerate_cohort_scores(pool, dspec, pspec, k, budget)
    opt_f = -math.inf
    opt_cohorts: list[tuple[str, ...]] = []
    for p, d, member_ids in scored:
        f = blend_objective(alpha, p, d)
        if f > opt_f:
            opt_f = f
            opt_cohorts = [member_ids]
        elif f == opt_f:
            opt_cohorts.append(member_ids)
    return ExactResult(
        opt_f=opt_f, opt_cohorts=tuple(opt_cohorts), enumerated_count=len(scored)
    )


def exact_frontier(
    pool: ApplicantPool,
    dspec: DiversitySpec,
    pspec: PerformanceSpec,
    k: int,
    budget: int = DEFAULT_BUDGET,
) -> Frontier:
    """The true frontier: Pareto filter over the exhaustive enumeration.

    No convex filtering here; the true frontier need not be convex.
    Points carry alpha=None since no scalarization produced them.
    """
    scored = enumerate_cohort_scores(pool, dspec, pspec, k, budget)
    survivors = pareto_filter(scored)
    survivors.sort(key=lambda row: row[0])
    points = tuple(
        FrontierPoint(alpha=None, performance=p, diversity=d, cohort_ids=member_ids)
        for p, d, member_ids in survivors
    )
    provenance = Provenance(
        pool_hash=pool_fingerprint(pool),
        spec_hash=specs_fingerprint(dspec, pspec),
        k=k,
        steps=0,  # exhaustive, not a scalarization sweep
        constraints={"cohort_size": k, "pinned": [], "excluded": []},
        raw_points=(),
    )
    return Frontier(points=points, provenance=provenance)


def naive_cohort_scores(
    pool: ApplicantPool,
    dspec: DiversitySpec,
    pspec: PerformanceSpec,
    cohort: Iterable[str],
    k: int,
) -> tuple[float, float]:
    """Independent from-scratch (performance, diversity) evaluator.

    Shares nothing with the optimizer's incremental path: membership is
    recounted by looping over the cohort, and the score sum is exact
    rational arithmetic converted to float at the end (which matches the
    correctly rounded ``fsum`` result bit for bit).
    """
    members = [pool[i] for i in cohort]
    total = Fraction(0)
    for a in members:
        total += Fraction(a.score)
    performance = float(total) / k

    weighted = 0.0
    for t in dspec.proportional:
        count = 0
        for a in members:
            if a.category(t.attribute) in t.values:
                count += 1
        threshold = t.target * k
        weighted += t.weight * (min(count, threshold) / threshold)
    for t in dspec.coverage:
        seen: set[str] = set()
        for a in members:
            c = a.category(t.attribute)
            if c != UNKNOWN:
                seen.add(c)
        weighted += t.weight * (min(len(seen), t.min_distinct) / t.min_distinct)
    total_weight = 0.0
    for t in dspec.proportional + dspec.coverage:
        total_weight += t.weight
    diversity = weighted / total_weight
    return performance, diversity
