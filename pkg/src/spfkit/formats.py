"""Canonical document forms, tabular exports, and content fingerprints.

Every serializer here is deterministic: keys are sorted, separators fixed,
and floats rendered by ``repr`` (shortest round-trip). The CLI writes these
bytes to files and the HTTP service returns them verbatim, so identical
inputs produce identical bytes on both surfaces.
"""

from __future__ import annotations

import hashlib
import json
from typing import Mapping

from .diversity import DiversitySpec, diversity_spec_to_doc, load_diversity_spec
from .errors import MalformedRowError
from .performance import Aggregator, PerformanceSpec
from .pool import Applicant, ApplicantPool, SelectionConstraints


def canonical_json_bytes(doc) -> bytes:
    """UTF-8 JSON with sorted keys and no whitespace; byte-stable per input."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


# -- pool ---------------------------------------------------------------


def pool_to_doc(pool: ApplicantPool) -> dict:
    return {
        "schema": [
            {"attribute": a, "categories": sorted(cats)} for a, cats in pool.schema.items()
        ],
        "applicants": [
            {"id": a.id, "score": a.score, "attributes": dict(a.attributes)}
            for a in pool.applicants
        ],
    }


def pool_from_doc(doc: Mapping) -> ApplicantPool:
    try:
        schema = {row["attribute"]: frozenset(row["categories"]) for row in doc["schema"]}
        applicants = [
            Applicant(id=row["id"], score=float(row["score"]), attributes=dict(row["attributes"]))
            for row in doc["applicants"]
        ]
    except (KeyError, TypeError) as e:
        raise MalformedRowError(f"bad pool document: {e}") from None
    return ApplicantPool(applicants, schema)


def pool_fingerprint(pool: ApplicantPool) -> str:
    return sha256_hex(canonical_json_bytes(pool_to_doc(pool)))


# -- specs --------------------------------------------------------------


def performance_spec_to_doc(pspec: PerformanceSpec) -> dict:
    return {"aggregator": pspec.aggregator.value, "score_field": pspec.score_field}


def performance_spec_from_doc(doc: Mapping) -> PerformanceSpec:
    return PerformanceSpec(
        aggregator=Aggregator(doc.get("aggregator", Aggregator.SUM_AS_MEAN_PROXY.value)),
        score_field=doc.get("score_field", "score"),
    )


def specs_fingerprint(dspec: DiversitySpec, pspec: PerformanceSpec) -> str:
    doc = {
        "diversity": diversity_spec_to_doc(dspec),
        "performance": performance_spec_to_doc(pspec),
    }
    return sha256_hex(canonical_json_bytes(doc))


# -- constraints --------------------------------------------------------


def constraints_to_doc(constraints: SelectionConstraints) -> dict:
    return {
        "cohort_size": constraints.cohort_size,
        "pinned": sorted(constraints.pinned),
        "excluded": sorted(constraints.excluded),
    }


def constraints_from_doc(doc: Mapping) -> SelectionConstraints:
    return SelectionConstraints(
        cohort_size=int(doc["cohort_size"]),
        pinned=frozenset(doc.get("pinned", ())),
        excluded=frozenset(doc.get("excluded", ())),
    )


# -- frontier -----------------------------------------------------------


def _point_to_doc(point) -> dict:
    return {
        "alpha": point.alpha,
        "performance": point.performance,
        "diversity": point.diversity,
        "cohort_ids": list(point.cohort_ids),
    }


def frontier_to_doc(frontier) -> dict:
    prov = frontier.provenance
    return {
        "points": [_point_to_doc(pt) for pt in frontier.points],
        "provenance": {
            "pool_hash": prov.pool_hash,
            "spec_hash": prov.spec_hash,
            "k": prov.k,
            "steps": prov.steps,
            "constraints": prov.constraints,
            "raw_points": [_point_to_doc(pt) for pt in prov.raw_points],
        },
    }


def frontier_to_json_bytes(frontier) -> bytes:
    return canonical_json_bytes(frontier_to_doc(frontier))


def frontier_to_csv(frontier) -> str:
    """Tabular export: alpha, performance, diversity, semicolon-joined member ids."""
    lines = ["alpha,performance,diversity,cohort_ids"]
    for pt in frontier.points:
        alpha = "" if pt.alpha is None else repr(pt.alpha)
        lines.append(
            f"{alpha},{pt.performance!r},{pt.diversity!r},{';'.join(pt.cohort_ids)}"
        )
    return "\n".join(lines) + "\n"


# -- gap report ---------------------------------------------------------


def gap_report_to_doc(report) -> dict:
    return {
        "actual": {
            "cohort_ids": list(report.actual_ids),
            "performance": report.actual_performance,
            "diversity": report.actual_diversity,
        },
        "diversity_gain": {"abs": report.diversity_gain_abs, "rel": report.diversity_gain_rel},
        "performance_gain": {
            "abs": report.performance_gain_abs,
            "rel": report.performance_gain_rel,
        },
    }


# -- misc ---------------------------------------------------------------


def parse_cohort_ids(text: str) -> list[str]:
    """Parse an actual-cohort file: ids separated by newlines and/or commas."""
    ids: list[str] = []
    for line in text.splitlines():
        for token in line.split(","):
            token = token.strip()
            if token:
                ids.append(token)
    return ids
