"""Applicant pools, selection constraints, and tabular ingestion.

An applicant has one performance score in [0, 1] and a set of categorical
attributes. Pools are immutable after construction and safe to share across
concurrent frontier computations. Missing attribute cells map to the
reserved category ``"unknown"``, which never matches any other category.

Scores outside [0, 1] are rejected, never clamped or rescaled: silent
normalization would corrupt comparability across selection cycles.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Mapping, TextIO

from .errors import (
    DuplicateIdError,
    InvalidConfigError,
    MalformedRowError,
    PinExcludeConflictError,
    ScoreOutOfRangeError,
    UnknownIdError,
)

#: Reserved category for missing attribute values.
UNKNOWN = "unknown"


@dataclass(frozen=True)
class Applicant:
    """One pool member: unique id, score in [0, 1], categorical attributes."""

    id: str
    score: float
    attributes: Mapping[str, str] = field(default_factory=dict)

    def category(self, attribute: str) -> str:
        return self.attributes.get(attribute, UNKNOWN)


class ApplicantPool:
    """Immutable roster of applicants with a declared attribute schema.

    ``schema`` maps each attribute name to the set of categories observed
    in the pool (including ``"unknown"`` where cells were missing).
    Applicant order is preserved from the input and used as the canonical
    iteration order everywhere downstream.
    """

    def __init__(self, applicants: Iterable[Applicant], schema: Mapping[str, frozenset[str]]):
        self._applicants: tuple[Applicant, ...] = tuple(applicants)
        self._schema: dict[str, frozenset[str]] = {k: frozenset(v) for k, v in schema.items()}
        self._by_id: dict[str, Applicant] = {}
        for a in self._applicants:
            if not a.id:
                raise MalformedRowError("empty applicant id")
            if a.id in self._by_id:
                raise DuplicateIdError(f"duplicate applicant id: {a.id!r}")
            if not (0.0 <= a.score <= 1.0):
                raise ScoreOutOfRangeError(f"score {a.score!r} for id {a.id!r} outside [0, 1]")
            extra = set(a.attributes) - set(self._schema)
            if extra:
                raise MalformedRowError(f"id {a.id!r} has attributes outside schema: {sorted(extra)}")
            self._by_id[a.id] = a

    @property
    def applicants(self) -> tuple[Applicant, ...]:
        return self._applicants

    @property
    def schema(self) -> dict[str, frozenset[str]]:
        return dict(self._schema)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(a.id for a in self._applicants)

    def __len__(self) -> int:
        return len(self._applicants)

    def __contains__(self, applicant_id: str) -> bool:
        return applicant_id in self._by_id

    def __getitem__(self, applicant_id: str) -> Applicant:
        try:
            return self._by_id[applicant_id]
        except KeyError:
            raise UnknownIdError(f"unknown applicant id: {applicant_id!r}") from None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ApplicantPool):
            return NotImplemented
        return self._applicants == other._applicants and self._schema == other._schema

    def subset_scores(self, ids: Iterable[str]) -> list[float]:
        return [self[i].score for i in ids]


@dataclass(frozen=True)
class SelectionConstraints:
    """Cohort size plus what-if pins and exclusions.

    Pinned applicants are forced into every cohort; excluded ones are
    removed from the candidate universe. The two sets must be disjoint.
    """

    cohort_size: int
    pinned: frozenset[str] = frozenset()
    excluded: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.cohort_size < 1:
            raise InvalidConfigError(f"cohort size must be >= 1, got {self.cohort_size}")
        object.__setattr__(self, "pinned", frozenset(self.pinned))
        object.__setattr__(self, "excluded", frozenset(self.excluded))
        conflict = self.pinned & self.excluded
        if conflict:
            raise PinExcludeConflictError(f"ids both pinned and excluded: {sorted(conflict)}")
        if len(self.pinned) > self.cohort_size:
            raise InvalidConfigError(
                f"{len(self.pinned)} pinned ids exceed cohort size {self.cohort_size}"
            )

    def validate_against(self, pool: ApplicantPool) -> None:
        for i in sorted(self.pinned | self.excluded):
            if i not in pool:
                raise UnknownIdError(f"constraint references unknown id: {i!r}")


@dataclass(frozen=True)
class Cohort:
    """A selected subset of applicant ids with its derived scores.

    ``ids`` are stored sorted lexicographically; ``performance`` and
    ``diversity`` are recomputable exactly from the member set.
    """

    ids: tuple[str, ...]
    performance: float
    diversity: float

    @property
    def id_set(self) -> frozenset[str]:
        return frozenset(self.ids)


def load_pool(
    source: TextIO | str,
    attributes: list[str] | None = None,
    *,
    id_field: str = "id",
    score_field: str = "score",
    delimiter: str = ",",
) -> ApplicantPool:
    """Load a pool from delimiter-separated text with a header row.

    The header must contain ``id_field`` and ``score_field``; every other
    column is treated as a categorical attribute unless ``attributes``
    names an explicit subset. Empty cells become ``"unknown"``. Rows keep
    their input order.
    """
    stream = io.StringIO(source) if isinstance(source, str) else source
    reader = csv.reader(stream, delimiter=delimiter)
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedRowError("empty input: header row required") from None
    header = [h.strip() for h in header]
    if id_field not in header:
        raise MalformedRowError(f"missing id column {id_field!r}")
    if score_field not in header:
        raise MalformedRowError(f"missing score column {score_field!r}")
    id_idx = header.index(id_field)
    score_idx = header.index(score_field)
    if attributes is None:
        attributes = [h for n, h in enumerate(header) if n not in (id_idx, score_idx)]
    missing = [a for a in attributes if a not in header]
    if missing:
        raise MalformedRowError(f"declared attribute columns not in header: {missing}")
    attr_idx = {a: header.index(a) for a in attributes}

    applicants: list[Applicant] = []
    categories: dict[str, set[str]] = {a: set() for a in attributes}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise MalformedRowError(
                f"line {lineno}: expected {len(header)} columns, got {len(row)}"
            )
        raw_score = row[score_idx].strip()
        try:
            score = float(raw_score)
        except ValueError:
            raise MalformedRowError(f"line {lineno}: unparseable score {raw_score!r}") from None
        if not (0.0 <= score <= 1.0):
            raise ScoreOutOfRangeError(f"line {lineno}: score {raw_score} outside [0, 1]")
        attrs = {}
        for a, n in attr_idx.items():
            cell = row[n].strip()
            attrs[a] = cell if cell else UNKNOWN
            categories[a].add(attrs[a])
        applicants.append(Applicant(id=row[id_idx].strip(), score=score, attributes=attrs))

    schema = {a: frozenset(categories[a]) for a in attributes}
    return ApplicantPool(applicants, schema)


def save_pool(pool: ApplicantPool, stream: TextIO, *, delimiter: str = ",") -> None:
    """Write a pool back to the tabular format accepted by :func:`load_pool`."""
    attributes = list(pool.schema)
    writer = csv.writer(stream, delimiter=delimiter, lineterminator="\n")
    writer.writerow(["id", "score"] + attributes)
    for a in pool.applicants:
        writer.writerow([a.id, repr(a.score)] + [a.category(attr) for attr in attributes])


def restrict(pool: ApplicantPool, constraints: SelectionConstraints) -> ApplicantPool:
    """Remove excluded applicants; pinned ids are guaranteed present in the result.

    Pinned ids must exist in the pool (UnknownIdError otherwise). Exclusion
    is plain set subtraction, so excluded ids already absent are ignored;
    this keeps restrict idempotent. Boundary validation of constraint files
    against the original pool is stricter, see
    :meth:`SelectionConstraints.validate_against`.
    """
    for i in sorted(constraints.pinned):
        if i not in pool:
            raise UnknownIdError(f"pinned id not in pool: {i!r}")
    kept = [a for a in pool.applicants if a.id not in constraints.excluded]
    return ApplicantPool(kept, pool.schema)
