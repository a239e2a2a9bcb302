"""Selection possibility frontiers for cohort selection.

Compute the trade-off curve between aggregate cohort performance and
cohort diversity over an applicant pool, explore it interactively with
pins and exclusions, and verify the greedy approximation against
exhaustive enumeration on small instances.
"""

from .diversity import (
    CoverageTarget,
    DiversitySpec,
    ProportionalTarget,
    compose,
    diversity_fraction,
    diversity_spec_to_doc,
    eval_coverage,
    eval_diversity,
    eval_proportional,
    load_diversity_spec,
    marginal_gain,
    target_breakdown,
)
from .errors import SpfError
from .frontier import (
    Frontier,
    FrontierPoint,
    ParetoGapReport,
    Provenance,
    build_frontier,
    convex_upper_filter,
    pareto_filter,
    pareto_gap,
)
from .greedy import (
    GreedyStats,
    GreedyTrace,
    ScalarizationGrid,
    blend_objective,
    evaluate_cohort,
    greedy_cohort,
    lazy_greedy_cohort,
)
from .oracle import ExactResult, exact_frontier, exact_opt
from .performance import Aggregator, PerformanceSpec, eval_performance, performance_fraction
from .pool import (
    Applicant,
    ApplicantPool,
    Cohort,
    SelectionConstraints,
    load_pool,
    restrict,
    save_pool,
)
from .synth import CategoricalAttribute, SynthConfig, generate_pool

__version__ = "0.1.0"

__all__ = [
    "Applicant",
    "ApplicantPool",
    "Aggregator",
    "CategoricalAttribute",
    "Cohort",
    "CoverageTarget",
    "DiversitySpec",
    "ExactResult",
    "Frontier",
    "FrontierPoint",
    "GreedyStats",
    "GreedyTrace",
    "ParetoGapReport",
    "PerformanceSpec",
    "ProportionalTarget",
    "Provenance",
    "ScalarizationGrid",
    "SelectionConstraints",
    "SpfError",
    "SynthConfig",
    "blend_objective",
    "build_frontier",
    "compose",
    "convex_upper_filter",
    "diversity_fraction",
    "diversity_spec_to_doc",
    "eval_coverage",
    "eval_diversity",
    "eval_performance",
    "eval_proportional",
    "evaluate_cohort",
    "exact_frontier",
    "exact_opt",
    "generate_pool",
    "greedy_cohort",
    "lazy_greedy_cohort",
    "load_diversity_spec",
    "load_pool",
    "marginal_gain",
    "pareto_filter",
    "pareto_gap",
    "performance_fraction",
    "restrict",
    "save_pool",
    "target_breakdown",
]
