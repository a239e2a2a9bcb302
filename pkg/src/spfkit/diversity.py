"""Monotone, submodular cohort diversity functions built from declarative targets.

Two target families are supported:

* **Proportional**: "at least proportion ``p`` of a size-k cohort should
  carry one of these categories". Scored as the truncated count
  ``min(matching_count, p*k) / (p*k)``, which rises linearly until the
  absolute threshold ``p*k`` is met and is flat afterwards. The truncation
  is what makes the target submodular: each matching applicant beyond the
  threshold adds nothing.
* **Coverage**: "the cohort should span at least ``m`` distinct categories
  of this attribute". Scored as ``min(distinct_present, m) / m``. The
  reserved category ``"unknown"`` never counts as a distinct category.

A :class:`DiversitySpec` combines any number of targets by weighted mean,
so the composite stays in [0, 1] and equals 1 exactly when every target is
met. Sums run in declared target order, keeping float results reproducible.

Thresholds are fixed by the final cohort size k even while a cohort is
still being grown, so a partial cohort can already saturate a target.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import (
    CandidateAlreadyPresentError,
    InvalidSpecError,
    UnknownAttributeError,
)
from .pool import UNKNOWN, ApplicantPool


@dataclass(frozen=True)
class ProportionalTarget:
    """Desire that ``values`` of ``attribute`` make up proportion ``target`` of the cohort.

    ``values`` may group several categories (e.g. non_male = female plus
    non_binary); an applicant matches when its category is in the set.
    """

    attribute: str
    values: frozenset[str]
    target: float
    weight: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "values", frozenset(self.values))
        if not self.values:
            raise InvalidSpecError(f"proportional target on {self.attribute!r} has no values")
        if not (0.0 < self.target <= 1.0):
            raise InvalidSpecError(f"target proportion must be in (0, 1], got {self.target}")
        if self.weight <= 0:
            raise InvalidSpecError(f"weight must be positive, got {self.weight}")

    def threshold(self, k: int) -> float:
        """Absolute member-count threshold for a cohort of size k."""
        return self.target * k


@dataclass(frozen=True)
class CoverageTarget:
    """Desire that the cohort spans at least ``min_distinct`` categories of ``attribute``."""

    attribute: str
    min_distinct: int
    weight: float = 1.0

    def __post_init__(self):
        if self.min_distinct < 1:
            raise InvalidSpecError(f"min_distinct must be >= 1, got {self.min_distinct}")
        if self.weight <= 0:
            raise InvalidSpecError(f"weight must be positive, got {self.weight}")


@dataclass(frozen=True)
class DiversitySpec:
    """Weighted set of proportional and coverage targets defining the cohort diversity score."""

    proportional: tuple[ProportionalTarget, ...] = ()
    coverage: tuple[CoverageTarget, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "proportional", tuple(self.proportional))
        object.__setattr__(self, "coverage", tuple(self.coverage))
        if not self.proportional and not self.coverage:
            raise InvalidSpecError("diversity spec needs at least one target")
        seen: set[tuple[str, frozenset[str]]] = set()
        for t in self.proportional:
            key = (t.attribute, t.values)
            if key in seen:
                raise InvalidSpecError(
                    f"duplicate proportional target on {t.attribute!r} values {sorted(t.values)}"
                )
            seen.add(key)

    @property
    def targets(self) -> tuple[ProportionalTarget | CoverageTarget, ...]:
        """All targets in fixed evaluation order: proportional first, then coverage."""
        return self.proportional + self.coverage

    def total_weight(self) -> float:
        return sum(t.weight for t in self.targets)

    def validate_against(self, pool: ApplicantPool) -> None:
        schema = pool.schema
        for t in self.targets:
            if t.attribute not in schema:
                raise UnknownAttributeError(
                    f"target attribute {t.attribute!r} not in pool schema {sorted(schema)}"
                )


def compose(*specs: DiversitySpec) -> DiversitySpec:
    """Combine the targets of several specs into one.

    Monotonicity and submodularity survive the composition since both are
    closed under positively weighted addition. Proportional targets that
    coincide on (attribute, values) merge by adding weights and keeping
    the larger proportion: w1*s + w2*s = (w1 + w2)*s.
    """
    proportional: dict[tuple[str, frozenset[str]], ProportionalTarget] = {}
    coverage: list[CoverageTarget] = []
    for s in specs:
        for t in s.proportional:
            key = (t.attribute, t.values)
            prior = proportional.get(key)
            if prior is None:
                proportional[key] = t
            else:
                proportional[key] = ProportionalTarget(
                    attribute=t.attribute,
                    values=t.values,
                    target=max(prior.target, t.target),
                    weight=prior.weight + t.weight,
                )
        coverage.extend(s.coverage)
    return DiversitySpec(tuple(proportional.values()), tuple(coverage))


def _check_attribute(pool: ApplicantPool, attribute: str) -> None:
    if attribute not in pool.schema:
        raise UnknownAttributeError(
            f"attribute {attribute!r} not in pool schema {sorted(pool.schema)}"
        )


def proportional_count(pool: ApplicantPool, target: ProportionalTarget, cohort: Iterable[str]) -> int:
    """Number of cohort members whose category matches the target's value set."""
    _check_attribute(pool, target.attribute)
    return sum(1 for i in cohort if pool[i].category(target.attribute) in target.values)


def coverage_distinct(pool: ApplicantPool, target: CoverageTarget, cohort: Iterable[str]) -> int:
    """Number of distinct known categories of the attribute present in the cohort."""
    _check_attribute(pool, target.attribute)
    present = {pool[i].category(target.attribute) for i in cohort}
    present.discard(UNKNOWN)
    return len(present)


def eval_proportional(
    pool: ApplicantPool, target: ProportionalTarget, cohort: Iterable[str], k: int
) -> float:
    """Truncated-count score in [0, 1]; exactly 1 when matches >= target * k."""
    threshold = target.threshold(k)
    return min(proportional_count(pool, target, cohort), threshold) / threshold


def eval_coverage(pool: ApplicantPool, target: CoverageTarget, cohort: Iterable[str]) -> float:
    """Truncated distinct-category score in [0, 1]; exactly 1 at min_distinct categories."""
    return min(coverage_distinct(pool, target, cohort), target.min_distinct) / target.min_distinct


def eval_diversity(
    pool: ApplicantPool, spec: DiversitySpec, cohort: Iterable[str], k: int
) -> float:
    """Weighted mean of per-target scores, in [0, 1]; 1 iff every target is met.

    Targets are summed in spec order so repeated evaluation of the same
    cohort is bit-identical.
    """
    cohort = list(cohort)
    num = 0.0
    for t in spec.proportional:
        num += t.weight * eval_proportional(pool, t, cohort, k)
    for t in spec.coverage:
        num += t.weight * eval_coverage(pool, t, cohort)
    return num / spec.total_weight()


def diversity_fraction(
    pool: ApplicantPool, spec: DiversitySpec, cohort: Iterable[str], k: int
) -> Fraction:
    """The diversity score as an exact rational.

    Thresholds and weights enter as the exact values of their stored
    doubles, so this computes the same mathematical function the float
    path approximates. Used wherever a difference of scores must order
    exactly (marginal gains, property checks): a difference of two
    rounded floats can flip an ulp-sized comparison, a rounded difference
    of exact rationals cannot.
    """
    cohort = list(cohort)
    num = Fraction(0)
    for t in spec.proportional:
        threshold = Fraction(t.threshold(k))
        count = proportional_count(pool, t, cohort)
        num += Fraction(t.weight) * (min(Fraction(count), threshold) / threshold)
    for t in spec.coverage:
        distinct = coverage_distinct(pool, t, cohort)
        num += Fraction(t.weight) * Fraction(min(distinct, t.min_distinct), t.min_distinct)
    total = Fraction(0)
    for t in spec.targets:
        total += Fraction(t.weight)
    return num / total


def marginal_gain(
    pool: ApplicantPool, spec: DiversitySpec, cohort: Iterable[str], candidate: str, k: int
) -> float:
    """Diversity gained by adding ``candidate``; never negative (monotonicity).

    Computed as the exact rational difference rounded once, so gains for
    the same candidate against nested cohorts always order correctly
    (diminishing returns hold with zero float violations).
    """
    members = set(cohort)
    if candidate in members:
        raise CandidateAlreadyPresentError(f"candidate {candidate!r} already in cohort")
    base = diversity_fraction(pool, spec, members, k)
    grown = diversity_fraction(pool, spec, members | {candidate}, k)
    return float(grown - base)


@dataclass(frozen=True)
class TargetStatus:
    """Satisfaction of one target by one cohort: raw count against its threshold."""

    kind: str  # "proportional" | "coverage"
    attribute: str
    detail: str  # value set or min-distinct description
    weight: float
    count: int
    threshold: float
    score: float
    met: bool


def target_breakdown(
    pool: ApplicantPool, spec: DiversitySpec, cohort: Iterable[str], k: int
) -> list[TargetStatus]:
    """Per-target satisfaction report; weighted scores re-sum to :func:`eval_diversity`."""
    cohort = list(cohort)
    rows: list[TargetStatus] = []
    for t in spec.proportional:
        count = proportional_count(pool, t, cohort)
        score = min(count, t.threshold(k)) / t.threshold(k)
        rows.append(
            TargetStatus(
                kind="proportional",
                attribute=t.attribute,
                detail="|".join(sorted(t.values)),
                weight=t.weight,
                count=count,
                threshold=t.threshold(k),
                score=score,
                met=count >= t.threshold(k),
            )
        )
    for t in spec.coverage:
        distinct = coverage_distinct(pool, t, cohort)
        score = min(distinct, t.min_distinct) / t.min_distinct
        rows.append(
            TargetStatus(
                kind="coverage",
                attribute=t.attribute,
                detail=f">={t.min_distinct} distinct",
                weight=t.weight,
                count=distinct,
                threshold=float(t.min_distinct),
                score=score,
                met=distinct >= t.min_distinct,
            )
        )
    return rows


def load_diversity_spec(doc: Mapping) -> DiversitySpec:
    """Build a spec from its document form.

    Expected shape::

        {"proportional": [{"attribute": ..., "values": [...], "target": ..., "weight": ...}],
         "coverage":     [{"attribute": ..., "min_distinct": ..., "weight": ...}]}

    ``values`` also accepts a single string; weights default to 1.0.
    """
    if not isinstance(doc, Mapping):
        raise InvalidSpecError("diversity spec document must be a mapping")
    unknown_keys = set(doc) - {"proportional", "coverage"}
    if unknown_keys:
        raise InvalidSpecError(f"unexpected keys in diversity spec: {sorted(unknown_keys)}")
    proportional = []
    for row in doc.get("proportional", []):
        try:
            values = row["values"]
            if isinstance(values, str):
                values = [values]
            proportional.append(
                ProportionalTarget(
                    attribute=row["attribute"],
                    values=frozenset(values),
                    target=float(row["target"]),
                    weight=float(row.get("weight", 1.0)),
                )
            )
        except KeyError as e:
            raise InvalidSpecError(f"proportional target missing key {e}") from None
    coverage = []
    for row in doc.get("coverage", []):
        try:
            coverage.append(
                CoverageTarget(
                    attribute=row["attribute"],
                    min_distinct=int(row["min_distinct"]),
                    weight=float(row.get("weight", 1.0)),
                )
            )
        except KeyError as e:
            raise InvalidSpecError(f"coverage target missing key {e}") from None
    return DiversitySpec(tuple(proportional), tuple(coverage))


def diversity_spec_to_doc(spec: DiversitySpec) -> dict:
    """Inverse of :func:`load_diversity_spec`."""
    return {
        "proportional": [
            {
                "attribute": t.attribute,
                "values": sorted(t.values),
                "target": t.target,
                "weight": t.weight,
            }
            for t in spec.proportional
        ],
        "coverage": [
            {"attribute": t.attribute, "min_distinct": t.min_distinct, "weight": t.weight}
            for t in spec.coverage
        ],
    }
