"""Greedy construction of size-k cohorts maximizing a diversity/performance blend.

For a scalarization weight alpha in [0, 1] the objective is

    F(c) = alpha * P(c) + (1 - alpha) * D(c)

with P and D both normalized to [0, 1]. P and D are monotone and
submodular, and both properties survive positively weighted addition, so F
is too; greedily adding the applicant with the best marginal gain until
the cohort reaches size k is then a (1 - 1/e)-approximation of the true
maximum over all size-k cohorts.

Two implementations share one contract and must return bit-identical
results on every input:

* :func:`greedy_cohort` re-scores every remaining candidate at each step.
* :func:`lazy_greedy_cohort` keeps candidates in a max-heap of previously
  computed gains. A stale gain is an upper bound on the current gain
  (submodularity), so a candidate whose recomputed gain still tops the
  heap is the true argmax and most candidates are never re-scored.

Marginal gains are computed exactly (rational arithmetic over the stored
double parameters) and rounded once to a double; comparisons are exact on
those doubles, with no epsilon, and ties break toward the
lexicographically smallest id. Pinned applicants seed the cohort before
any greedy pick, and excluded ones never enter the candidate set.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .diversity import DiversitySpec, eval_diversity
from .errors import PoolTooSmallError
from .performance import PerformanceSpec, eval_performance
from .pool import UNKNOWN, ApplicantPool, Cohort, SelectionConstraints, restrict


def blend_objective(alpha: float, performance: float, diversity: float) -> float:
    """The scalarized objective alpha * P + (1 - alpha) * D."""
    return alpha * performance + (1.0 - alpha) * diversity


def evaluate_cohort(
    pool: ApplicantPool,
    dspec: DiversitySpec,
    pspec: PerformanceSpec,
    ids: Iterable[str],
    k: int,
) -> tuple[float, float]:
    """Canonical (performance, diversity) of a member set, from scratch."""
    ids = list(ids)
    return (
        eval_performance(pool, pspec, ids, k),
        eval_diversity(pool, dspec, ids, k),
    )


@dataclass(frozen=True)
class ScalarizationGrid:
    """Evenly spaced scalarization weights: i / steps for i = 0 .. steps."""

    steps: int = 20

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")

    def alphas(self) -> list[float]:
        return [i / self.steps for i in range(self.steps + 1)]


@dataclass(frozen=True)
class Pick:
    """One greedy selection: who, the exact marginal gain (rounded once), and F afterwards."""

    id: str
    gain: float
    f_value: float


@dataclass(frozen=True)
class GreedyTrace:
    """Audit record of a greedy run; replaying the picks reproduces each F exactly."""

    alpha: float
    picks: tuple[Pick, ...]
    final_f: float


@dataclass
class GreedyStats:
    """Instrumentation: how many candidate scorings a run performed."""

    evaluations: int = 0


class _IncrementalState:
    """Per-run evaluation state: target counters plus the member score list.

    Two value systems coexist deliberately:

    * Reported F values (the trace) come from the canonical float path:
      per-target scores from integer counts in spec order, ``math.fsum``
      for the score sum, so they match ``evaluate_cohort`` bit for bit.
    * Selection gains are exact rationals rounded once to float. A gain
      computed as a difference of two rounded floats can sit an ulp above
      a gain computed earlier against a smaller cohort, which would break
      the lazy heap's stale-bound invariant and let lazy and eager runs
      split on ties; exact gains are exactly submodular, and correct
      rounding preserves their ordering.

    Per-target gain deltas depend only on the current match count, so each
    candidate scoring is O(#targets) table lookups.
    """

    def __init__(
        self,
        pool: ApplicantPool,
        dspec: DiversitySpec,
        pspec: PerformanceSpec,
        k: int,
        alpha: float,
        stats: GreedyStats,
    ):
        self.pool = pool
        self.dspec = dspec
        self.k = k
        self.alpha = alpha
        self.stats = stats
        self.members: list[str] = []
        self.scores: list[float] = []
        self.total_weight = dspec.total_weight()
        self.prop_counts = [0] * len(dspec.proportional)
        self.cov_counts: list[dict[str, int]] = [{} for _ in dspec.coverage]
        self.cov_distinct = [0] * len(dspec.coverage)

        alpha_frac = Fraction(alpha)
        weight_sum = Fraction(0)
        for t in dspec.targets:
            weight_sum += Fraction(t.weight)
        self._div_scale = (1 - alpha_frac) / weight_sum  # (1 - alpha) / total weight

        # Gain of one more match on target j, given j currently has c matches:
        # w_j * (s_j(c + 1) - s_j(c)) as an exact rational.
        def truncated(c: int, threshold: Fraction) -> Fraction:
            return min(Fraction(c), threshold) / threshold

        self._prop_delta: list[list[Fraction]] = []
        for t in dspec.proportional:
            threshold = Fraction(t.threshold(k))
            w = Fraction(t.weight)
            self._prop_delta.append(
                [w * (truncated(c + 1, threshold) - truncated(c, threshold)) for c in range(k + 1)]
            )
        self._cov_delta: list[list[Fraction]] = []
        for t in dspec.coverage:
            w = Fraction(t.weight)
            self._cov_delta.append(
                [
                    w * Fraction(min(c + 1, t.min_distinct) - min(c, t.min_distinct), t.min_distinct)
                    for c in range(k + 1)
                ]
            )

        # Per-applicant target membership and performance term, resolved once.
        self._prop_match: dict[str, tuple[int, ...]] = {}
        self._cov_cat: dict[str, tuple[str | None, ...]] = {}
        self._perf_term: dict[str, Fraction] = {}
        for a in pool.applicants:
            self._prop_match[a.id] = tuple(
                j for j, t in enumerate(dspec.proportional) if a.category(t.attribute) in t.values
            )
            self._cov_cat[a.id] = tuple(
                None if (c := a.category(t.attribute)) == UNKNOWN else c
                for t in dspec.coverage
            )
            self._perf_term[a.id] = alpha_frac * Fraction(a.score) / k
        self.f_value = self._canonical_f()

    def _canonical_f(self) -> float:
        perf = math.fsum(self.scores) / self.k
        num = 0.0
        for t, count in zip(self.dspec.proportional, self.prop_counts):
            threshold = t.threshold(self.k)
            num += t.weight * (min(count, threshold) / threshold)
        for t, distinct in zip(self.dspec.coverage, self.cov_distinct):
            num += t.weight * (min(distinct, t.min_distinct) / t.min_distinct)
        div = num / self.total_weight
        return blend_objective(self.alpha, perf, div)

    def gain(self, candidate: str) -> float:
        """Exact marginal gain of adding ``candidate``, rounded once to float."""
        self.stats.evaluations += 1
        dsum = Fraction(0)
        for j in self._prop_match[candidate]:
            dsum += self._prop_delta[j][self.prop_counts[j]]
        for j, cat in enumerate(self._cov_cat[candidate]):
            if cat is not None and self.cov_counts[j].get(cat, 0) == 0:
                dsum += self._cov_delta[j][self.cov_distinct[j]]
        return float(self._perf_term[candidate] + self._div_scale * dsum)

    def add(self, candidate: str) -> None:
        for j in self._prop_match[candidate]:
            self.prop_counts[j] += 1
        for j, cat in enumerate(self._cov_cat[candidate]):
            if cat is not None:
                counts = self.cov_counts[j]
                if counts.get(cat, 0) == 0:
                    self.cov_distinct[j] += 1
                counts[cat] = counts.get(cat, 0) + 1
        self.members.append(candidate)
        self.scores.append(self.pool[candidate].score)
        self.f_value = self._canonical_f()


def _prepare(
    pool: ApplicantPool,
    dspec: DiversitySpec,
    pspec: PerformanceSpec,
    constraints: SelectionConstraints,
    alpha: float,
    stats: GreedyStats | None,
) -> tuple[_IncrementalState, list[str], int, GreedyStats]:
    if not (0.0 <= alpha <= 1.0):
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    candidate_pool = restrict(pool, constraints)
    dspec.validate_against(candidate_pool)
    k = constraints.cohort_size
    if len(candidate_pool) < k:
        raise PoolTooSmallError(
            f"pool has {len(candidate_pool)} applicants after exclusions, need k={k}"
        )
    stats = stats if stats is not None else GreedyStats()
    state = _IncrementalState(candidate_pool, dspec, pspec, k, alpha, stats)
    for i in sorted(constraints.pinned):
        state.add(i)
    candidates = sorted(i for i in candidate_pool.ids if i not in constraints.pinned)
    return state, candidates, k, stats


def _finish(
    state: _IncrementalState,
    picks: list[Pick],
    alpha: float,
    dspec: DiversitySpec,
    pspec: PerformanceSpec,
    k: int,
) -> tuple[Cohort, GreedyTrace]:
    ids = tuple(sorted(state.members))
    perf, div = evaluate_cohort(state.pool, dspec, pspec, ids, k)
    cohort = Cohort(ids=ids, performance=perf, diversity=div)
    trace = GreedyTrace(alpha=alpha, picks=tuple(picks), final_f=state.f_value)
    return cohort, trace


def greedy_cohort(
    pool: ApplicantPool,
    dspec: DiversitySpec,
    pspec: PerformanceSpec,
    constraints: SelectionConstraints,
    alpha: float,
    stats: GreedyStats | None = None,
) -> tuple[Cohort, GreedyTrace]:
    """Build a size-k cohort, re-scoring every remaining candidate at each step."""
    state, candidates, k, stats = _prepare(pool, dspec, pspec, constraints, alpha, stats)
    picks: list[Pick] = []
    while len(state.members) < k:
        best_id = None
        best_gain = -math.inf
        for cand in candidates:
            g = state.gain(cand)
            if g > best_gain:
                best_gain, best_id = g, cand
        assert best_id is not None
        candidates.remove(best_id)
        state.add(best_id)
        picks.append(Pick(id=best_id, gain=best_gain, f_value=state.f_value))
    return _finish(state, picks, alpha, dspec, pspec, k)


def lazy_greedy_cohort(
    pool: ApplicantPool,
    dspec: DiversitySpec,
    pspec: PerformanceSpec,
    constraints: SelectionConstraints,
    alpha: float,
    stats: GreedyStats | None = None,
) -> tuple[Cohort, GreedyTrace]:
    """Same contract and output as :func:`greedy_cohort`, far fewer scorings.

    Heap entries carry the member count at which their gain was computed;
    an entry popped with a stale count is re-scored and pushed back. The
    heap orders by (-gain, id), so equal gains surface the smallest id
    first and the selected candidate always matches the eager scan.
    """
    state, candidates, k, stats = _prepare(pool, dspec, pspec, constraints, alpha, stats)
    picks: list[Pick] = []
    if len(state.members) < k:
        heap = [(-state.gain(c), c, len(state.members)) for c in candidates]
        heapq.heapify(heap)
        while len(state.members) < k:
            neg_gain, cand, at_size = heapq.heappop(heap)
            if at_size == len(state.members):
                state.add(cand)
                picks.append(Pick(id=cand, gain=-neg_gain, f_value=state.f_value))
            else:
                heapq.heappush(heap, (-state.gain(cand), cand, len(state.members)))
    return _finish(state, picks, alpha, dspec, pspec, k)
