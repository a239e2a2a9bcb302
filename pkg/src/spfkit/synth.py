"""Deterministic synthetic applicant pools for demos and verification.

Real selection data is private, so quantitative checks run on generated
pools instead. Generation is fully determined by the seed: same seed and
config, same pool, byte for byte.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import InvalidConfigError
from .pool import Applicant, ApplicantPool


@dataclass(frozen=True)
class CategoricalAttribute:
    """One synthetic attribute: categories with sampling weights."""

    name: str
    categories: tuple[str, ...]
    weights: tuple[float, ...]
    missing_rate: float = 0.0

    def __post_init__(self):
        if len(self.categories) != len(self.weights):
            raise InvalidConfigError(f"attribute {self.name!r}: categories/weights length mismatch")
        if not self.categories:
            raise InvalidConfigError(f"attribute {self.name!r} has no categories")
        if any(w < 0 for w in self.weights) or sum(self.weights) <= 0:
            raise InvalidConfigError(f"attribute {self.name!r} has invalid weights")
        if not (0.0 <= self.missing_rate < 1.0):
            raise InvalidConfigError(f"attribute {self.name!r}: missing_rate outside [0, 1)")


def default_attributes() -> tuple[CategoricalAttribute, ...]:
    """A plausible demographic layout: gender, country, socioeconomic band."""
    return (
        CategoricalAttribute("gender", ("male", "female", "non_binary"), (0.55, 0.42, 0.03)),
        CategoricalAttribute(
            "country",
            ("AR", "BR", "DE", "IN", "KE", "MX", "NG", "PH", "UK", "US"),
            (0.06, 0.10, 0.07, 0.22, 0.05, 0.08, 0.09, 0.08, 0.10, 0.15),
        ),
        CategoricalAttribute("ses", ("low", "middle", "high"), (0.3, 0.5, 0.2)),
    )


@dataclass(frozen=True)
class SynthConfig:
    n: int
    seed: int = 0
    attributes: tuple[CategoricalAttribute, ...] = field(default_factory=default_attributes)
    score_beta: tuple[float, float] | None = None  # None = uniform [0, 1]

    def __post_init__(self):
        if self.n < 1:
            raise InvalidConfigError(f"pool size must be >= 1, got {self.n}")


def generate_pool(config: SynthConfig) -> ApplicantPool:
    """Sample a pool of ``config.n`` applicants with ids a0001, a0002, ..."""
    rng = random.Random(config.seed)
    width = max(4, len(str(config.n)))
    applicants = []
    categories: dict[str, set[str]] = {a.name: set() for a in config.attributes}
    for i in range(1, config.n + 1):
        if config.score_beta is None:
            score = rng.random()
        else:
            score = rng.betavariate(*config.score_beta)
        attrs = {}
        for attr in config.attributes:
            if attr.missing_rate > 0.0 and rng.random() < attr.missing_rate:
                value = "unknown"
            else:
                value = rng.choices(attr.categories, weights=attr.weights, k=1)[0]
            attrs[attr.name] = value
            categories[attr.name].add(value)
        applicants.append(Applicant(id=f"a{i:0{width}d}", score=score, attributes=attrs))
    schema = {a.name: frozenset(categories[a.name]) for a in config.attributes}
    return ApplicantPool(applicants, schema)


def config_from_doc(doc: dict) -> SynthConfig:
    """Build a config from its JSON form (see README for the schema)."""
    try:
        attrs = []
        for row in doc.get("attributes", []):
            attrs.append(
                CategoricalAttribute(
                    name=row["name"],
                    categories=tuple(row["categories"]),
                    weights=tuple(float(w) for w in row["weights"]),
                    missing_rate=float(row.get("missing_rate", 0.0)),
                )
            )
        beta = doc.get("score_beta")
        return SynthConfig(
            n=int(doc["n"]),
            seed=int(doc.get("seed", 0)),
            attributes=tuple(attrs) if attrs else default_attributes(),
            score_beta=tuple(beta) if beta else None,
        )
    except KeyError as e:
        raise InvalidConfigError(f"synthetic pool config missing key {e}") from None
