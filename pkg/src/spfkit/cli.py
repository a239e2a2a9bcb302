"""Batch command-line interface.

Subcommands: ``frontier`` (build and export a frontier), ``gap`` (compare
an actual cohort against the frontier), ``verify`` (exhaustive-oracle
check of the greedy approximation ratio), ``synth`` (generate a seeded
synthetic pool), and ``serve`` (launch the HTTP service).

Exit codes are stable for scripting: 0 success, 1 usage error, 2 data
error, 3 verification failure. Failures print one JSON line to stderr:
``{"category": ..., "message": ...}``. All outputs are deterministic
given identical inputs and seeds.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from pathlib import Path

from .diversity import load_diversity_spec
from .errors import SizeMismatchError, SpfError, UnknownIdError
from .formats import (
    constraints_from_doc,
    frontier_to_csv,
    frontier_to_json_bytes,
    gap_report_to_doc,
    canonical_json_bytes,
    parse_cohort_ids,
)
from .frontier import build_frontier, pareto_gap
from .greedy import ScalarizationGrid, blend_objective, lazy_greedy_cohort
from .oracle import DEFAULT_BUDGET, exact_opt
from .performance import PerformanceSpec
from .plotsvg import render_frontier_svg
from .pool import ApplicantPool, SelectionConstraints, load_pool, save_pool
from .synth import SynthConfig, config_from_doc, generate_pool

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_VERIFY = 3

APPROX_BOUND = 1.0 - 1.0 / math.e


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems instead of sys.exiting with code 2."""

    def error(self, message):
        raise _UsageError(message)


class _IoError(SpfError):
    category = "io"


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise _IoError(f"cannot read {path}: {e}") from None


def _write_bytes(path: str, data: bytes) -> None:
    try:
        Path(path).write_bytes(data)
    except OSError as e:
        raise _IoError(f"cannot write {path}: {e}") from None


def _load_inputs(args) -> tuple[ApplicantPool, object, PerformanceSpec, SelectionConstraints]:
    pool = load_pool(_read_text(args.pool))
    dspec = load_diversity_spec(json.loads(_read_text(args.spec)))
    pspec = PerformanceSpec()
    if args.constraints:
        doc = json.loads(_read_text(args.constraints))
        if args.k is not None:
            doc["cohort_size"] = args.k
        constraints = constraints_from_doc(doc)
    else:
        if args.k is None:
            raise _UsageError("either --k or --constraints is required")
        constraints = SelectionConstraints(cohort_size=args.k)
    constraints.validate_against(pool)
    return pool, dspec, pspec, constraints


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pool", required=True, help="applicant pool CSV")
    p.add_argument("--spec", required=True, help="diversity spec JSON")
    p.add_argument("--k", type=int, default=None, help="cohort size")
    p.add_argument("--steps", type=int, default=20, help="scalarization grid steps")
    p.add_argument("--constraints", default=None, help="constraints JSON (pins/exclusions)")
    p.add_argument("--threads", type=int, default=1, help="worker threads, 0 = auto")


def cmd_frontier(args) -> int:
    pool, dspec, pspec, constraints = _load_inputs(args)
    frontier = build_frontier(
        pool, dspec, pspec, constraints, ScalarizationGrid(args.steps), threads=args.threads
    )
    if args.out:
        _write_bytes(args.out, frontier_to_csv(frontier).encode("utf-8"))
    if args.json_out:
        _write_bytes(args.json_out, frontier_to_json_bytes(frontier))
    if args.plot:
        _write_bytes(args.plot, render_frontier_svg(frontier).encode("utf-8"))
    ps = [pt.performance for pt in frontier.points]
    ds = [pt.diversity for pt in frontier.points]
    print(
        f"frontier: {len(frontier.points)} points, "
        f"performance [{min(ps):.4f}, {max(ps):.4f}], "
        f"diversity [{max(ds):.4f}, {min(ds):.4f}]"
    )
    return EXIT_OK


def cmd_gap(args) -> int:
    pool, dspec, pspec, constraints = _load_inputs(args)
    ids = parse_cohort_ids(_read_text(args.cohort))
    for i in ids:
        if i not in pool:
            raise UnknownIdError(f"actual-cohort id not in pool: {i!r}")
    if len(set(ids)) != constraints.cohort_size:
        raise SizeMismatchError(
            f"actual cohort has {len(set(ids))} distinct ids, expected k={constraints.cohort_size}"
        )
    frontier = build_frontier(
        pool, dspec, pspec, constraints, ScalarizationGrid(args.steps), threads=args.threads
    )
    report = pareto_gap(pool, frontier, ids, dspec, pspec, constraints.cohort_size)
    doc = gap_report_to_doc(report)
    if args.out:
        _write_bytes(args.out, canonical_json_bytes(doc))
    if args.plot:
        _write_bytes(args.plot, render_frontier_svg(frontier, gap=report).encode("utf-8"))
    print(
        f"gap: diversity +{report.diversity_gain_abs:.4f} "
        f"({_pct(report.diversity_gain_rel)}), "
        f"performance +{report.performance_gain_abs:.4f} "
        f"({_pct(report.performance_gain_rel)})"
    )
    return EXIT_OK


def _pct(rel: float | None) -> str:
    return "n/a" if rel is None else f"{100.0 * rel:.1f}%"


def cmd_verify(args) -> int:
    pool, dspec, pspec, constraints = _load_inputs(args)
    k = constraints.cohort_size
    if constraints.pinned or constraints.excluded:
        raise _UsageError("verify runs on an unconstrained pool")
    worst = math.inf
    for alpha in ScalarizationGrid(args.steps).alphas():
        cohort, _ = lazy_greedy_cohort(pool, dspec, pspec, constraints, alpha)
        greedy_f = blend_objective(alpha, cohort.performance, cohort.diversity)
        result = exact_opt(pool, dspec, pspec, k, alpha, budget=args.budget)
        if result.opt_f > 0.0:
            worst = min(worst, greedy_f / result.opt_f)
    worst = 1.0 if worst == math.inf else worst
    print(f"worst greedy/optimal ratio: {worst:.6f} (bound {APPROX_BOUND:.6f})")
    if worst < APPROX_BOUND:
        print(
            json.dumps({"category": "verification_failure", "message": f"ratio {worst}"}),
            file=sys.stderr,
        )
        return EXIT_VERIFY
    return EXIT_OK


def cmd_synth(args) -> int:
    if args.config:
        doc = json.loads(_read_text(args.config))
        doc.setdefault("n", args.n)
        if args.n is not None:
            doc["n"] = args.n
        if args.seed is not None:
            doc["seed"] = args.seed
        config = config_from_doc(doc)
    else:
        if args.n is None:
            raise _UsageError("--n is required without --config")
        config = SynthConfig(n=args.n, seed=args.seed if args.seed is not None else 0)
    pool = generate_pool(config)
    buf = io.StringIO()
    save_pool(pool, buf)
    _write_bytes(args.out, buf.getvalue().encode("utf-8"))
    print(f"wrote {len(pool)} applicants to {args.out}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app

    app = create_app(ServiceConfig(job_work_threshold=args.job_threshold))
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="spfkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("frontier", help="compute a frontier and export it")
    _add_common(p)
    p.add_argument("--out", default=None, help="frontier CSV output path")
    p.add_argument("--json-out", default=None, help="frontier JSON document output path")
    p.add_argument("--plot", default=None, help="frontier SVG output path")
    p.set_defaults(func=cmd_frontier)

    p = sub.add_parser("gap", help="compare an actual cohort against the frontier")
    _add_common(p)
    p.add_argument("--cohort", required=True, help="actual cohort file (one id per line)")
    p.add_argument("--out", default=None, help="gap report JSON output path")
    p.add_argument("--plot", default=None, help="SVG with actual point and gain guides")
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("verify", help="check the greedy ratio against exhaustive enumeration")
    _add_common(p)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max cohorts to enumerate")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("synth", help="generate a deterministic synthetic pool")
    p.add_argument("--n", type=int, default=None, help="pool size")
    p.add_argument("--seed", type=int, default=None, help="random seed")
    p.add_argument("--config", default=None, help="generation config JSON")
    p.add_argument("--out", required=True, help="pool CSV output path")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument(
        "--job-threshold",
        type=int,
        default=2_000_000,
        dest="job_threshold",
        help="n*k*steps above which frontier requests become polled jobs",
    )
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as e:
        print(json.dumps({"category": "usage", "message": str(e)}), file=sys.stderr)
        return EXIT_USAGE
    except json.JSONDecodeError as e:
        print(json.dumps({"category": "malformed_document", "message": str(e)}), file=sys.stderr)
        return EXIT_DATA
    except SpfError as e:
        print(json.dumps({"category": e.category, "message": e.message}), file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
