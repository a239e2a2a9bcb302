"""Cohort-level performance aggregation.

Optimizing the arithmetic mean over cohorts of varying size is neither
monotone nor submodular, so the only supported aggregator is the fixed-k
sum proxy: internally the member-score sum drives the optimizer (sums are
modular, hence monotone and submodular), and the reported value divides by
the constant k so a full cohort reads as its mean score. Dividing by a
constant changes neither the ordering of cohorts nor any greedy argmax.

Score sums use ``math.fsum``, whose result is the correctly rounded exact
sum and therefore independent of member iteration order; every evaluation
path in the package reproduces identical floats for the same member set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable

from .errors import InvalidSpecError
from .pool import ApplicantPool


class Aggregator(Enum):
    SUM_AS_MEAN_PROXY = "sum_as_mean_proxy"


@dataclass(frozen=True)
class PerformanceSpec:
    """Aggregation choice plus the name of the ingested score column."""

    aggregator: Aggregator = Aggregator.SUM_AS_MEAN_PROXY
    score_field: str = "score"

    def __post_init__(self):
        if not isinstance(self.aggregator, Aggregator):
            raise InvalidSpecError(f"unsupported aggregator: {self.aggregator!r}")


def eval_performance(
    pool: ApplicantPool, spec: PerformanceSpec, cohort: Iterable[str], k: int
) -> float:
    """Sum of member scores divided by k, in [0, 1]; the mean for a full cohort."""
    return math.fsum(pool[i].score for i in cohort) / k


def performance_fraction(
    pool: ApplicantPool, spec: PerformanceSpec, cohort: Iterable[str], k: int
) -> Fraction:
    """Exact rational counterpart of :func:`eval_performance`.

    The marginal contribution of an applicant is exactly score / k here,
    independent of who else is in the cohort; float rounding cannot blur
    that modularity in rational arithmetic.
    """
    total = Fraction(0)
    for i in cohort:
        total += Fraction(pool[i].score)
    return total / k
