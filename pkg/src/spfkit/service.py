"""HTTP API for interactive what-if exploration of selection frontiers.

A session wraps one uploaded pool and diversity spec. Clients request
frontiers with per-request cohort size, grid steps, and pinned/excluded
working sets; recomputing with changed pins is the what-if loop. Frontier
responses are canonical JSON bytes shared with the CLI serializer, cached
per constraint snapshot: identical requests return identical bytes without
recomputation. Requests whose estimated work (n * k * steps) exceeds a
threshold run as jobs on a bounded worker pool and are polled via
``GET /jobs/{id}``.

What-if computations never mutate applicant data; sessions live in memory,
with optional JSON snapshots per session when a snapshot directory is
configured. The service is meant to bind to localhost; anything
multi-user belongs behind a reverse proxy.
"""

from __future__ import annotations

import hashlib
import json
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, File, Form, Request, Response, UploadFile
from fastapi.responses import JSONResponse

from .diversity import DiversitySpec, load_diversity_spec, diversity_spec_to_doc, target_breakdown
from .errors import SpfError
from .formats import (
    canonical_json_bytes,
    frontier_to_csv,
    frontier_to_json_bytes,
    gap_report_to_doc,
    pool_fingerprint,
    pool_from_doc,
    pool_to_doc,
    specs_fingerprint,
)
from .frontier import Frontier, build_frontier, pareto_gap
from .greedy import ScalarizationGrid
from .performance import PerformanceSpec
from .pool import ApplicantPool, SelectionConstraints, load_pool

_STATUS_BY_CATEGORY = {
    "pin_exclude_conflict": 409,
    "pool_too_small": 422,
    "size_mismatch": 422,
    "unknown_id": 422,
    "budget_exceeded": 422,
    "unknown_session": 404,
    "unknown_job": 404,
    "unknown_point": 404,
    "no_frontier": 409,
}


class _NotFoundError(SpfError):
    category = "unknown_session"


class _UnknownJobError(SpfError):
    category = "unknown_job"


class _UnknownPointError(SpfError):
    category = "unknown_point"


class _NoFrontierError(SpfError):
    category = "no_frontier"


@dataclass
class ServiceConfig:
    job_work_threshold: int = 2_000_000
    job_workers: int = 2
    snapshot_dir: str | None = None


@dataclass
class Session:
    session_id: str
    pool: ApplicantPool
    dspec: DiversitySpec
    pspec: PerformanceSpec
    pinned: set[str] = field(default_factory=set)
    excluded: set[str] = field(default_factory=set)
    cache: dict[str, dict] = field(default_factory=dict)
    last_frontier: Frontier | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)


@dataclass
class Job:
    job_id: str
    status: str = "queued"  # queued | running | done | error
    result_bytes: bytes | None = None
    error: dict | None = None


def _snapshot_key(session: Session, k: int, steps: int) -> str:
    doc = {
        "pool_hash": pool_fingerprint(session.pool),
        "spec_hash": specs_fingerprint(session.dspec, session.pspec),
        "k": k,
        "steps": steps,
        "pinned": sorted(session.pinned),
        "excluded": sorted(session.excluded),
    }
    return hashlib.sha256(canonical_json_bytes(doc)).hexdigest()


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    app = FastAPI(title="selection frontier service")
    sessions: dict[str, Session] = {}
    jobs: dict[str, Job] = {}
    executor = ThreadPoolExecutor(max_workers=config.job_workers)

    @app.exception_handler(SpfError)
    async def _spf_error(_request: Request, exc: SpfError):
        status = _STATUS_BY_CATEGORY.get(exc.category, 400)
        return JSONResponse(
            status_code=status, content={"category": exc.category, "message": exc.message}
        )

    def _session(session_id: str) -> Session:
        try:
            return sessions[session_id]
        except KeyError:
            raise _NotFoundError(f"unknown session: {session_id}") from None

    def _persist(session: Session) -> None:
        if config.snapshot_dir is None:
            return
        path = Path(config.snapshot_dir) / f"{session.session_id}.json"
        doc = {
            "session_id": session.session_id,
            "pool": pool_to_doc(session.pool),
            "diversity_spec": diversity_spec_to_doc(session.dspec),
            "pinned": sorted(session.pinned),
            "excluded": sorted(session.excluded),
        }
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(canonical_json_bytes(doc))

    def _restore_sessions() -> None:
        if config.snapshot_dir is None:
            return
        root = Path(config.snapshot_dir)
        if not root.is_dir():
            return
        for path in sorted(root.glob("*.json")):
            doc = json.loads(path.read_text(encoding="utf-8"))
            session = Session(
                session_id=doc["session_id"],
                pool=pool_from_doc(doc["pool"]),
                dspec=load_diversity_spec(doc["diversity_spec"]),
                pspec=PerformanceSpec(),
                pinned=set(doc.get("pinned", ())),
                excluded=set(doc.get("excluded", ())),
            )
            sessions[session.session_id] = session

    _restore_sessions()

    @app.post("/pools", status_code=201)
    async def create_session(
        pool_file: UploadFile = File(...), spec: str = Form(...)
    ) -> dict:
        text = (await pool_file.read()).decode("utf-8")
        pool = load_pool(text)
        dspec = load_diversity_spec(json.loads(spec))
        dspec.validate_against(pool)
        session = Session(
            session_id=uuid.uuid4().hex,
            pool=pool,
            dspec=dspec,
            pspec=PerformanceSpec(),
        )
        sessions[session.session_id] = session
        _persist(session)
        return {
            "session_id": session.session_id,
            "size": len(pool),
            "schema": [
                {"attribute": a, "categories": sorted(cats)}
                for a, cats in pool.schema.items()
            ],
        }

    def _compute_frontier(session: Session, k: int, steps: int, key: str) -> dict:
        constraints = SelectionConstraints(
            cohort_size=k,
            pinned=frozenset(session.pinned),
            excluded=frozenset(session.excluded),
        )
        constraints.validate_against(session.pool)
        frontier = build_frontier(
            session.pool, session.dspec, session.pspec, constraints, ScalarizationGrid(steps)
        )
        entry = {
            "json": frontier_to_json_bytes(frontier),
            "csv": frontier_to_csv(frontier).encode("utf-8"),
            "frontier": frontier,
        }
        with session.lock:
            session.cache[key] = entry
            session.last_frontier = frontier
        return entry

    def _frontier_response(entry: dict, accept: str) -> Response:
        if "text/csv" in accept:
            return Response(content=entry["csv"], media_type="text/csv")
        return Response(content=entry["json"], media_type="application/json")

    @app.post("/sessions/{session_id}/frontier")
    async def session_frontier(session_id: str, request: Request) -> Response:
        session = _session(session_id)
        body = await request.json()
        k = int(body["k"])
        steps = int(body.get("steps", 20))
        with session.lock:
            session.pinned = set(body.get("pinned", ()))
            session.excluded = set(body.get("excluded", ()))
        # Constraint validity (including pin/exclude conflicts) is checked
        # by the constraints object inside the computation.
        SelectionConstraints(
            cohort_size=k,
            pinned=frozenset(session.pinned),
            excluded=frozenset(session.excluded),
        ).validate_against(session.pool)
        _persist(session)
        key = _snapshot_key(session, k, steps)
        accept = request.headers.get("accept", "application/json")
        with session.lock:
            cached = session.cache.get(key)
        if cached is not None:
            return _frontier_response(cached, accept)

        work = len(session.pool) * k * steps
        if work <= config.job_work_threshold:
            entry = _compute_frontier(session, k, steps, key)
            return _frontier_response(entry, accept)

        job = Job(job_id=uuid.uuid4().hex)
        jobs[job.job_id] = job

        def run() -> None:
            job.status = "running"
            try:
                _compute_frontier(session, k, steps, key)
                job.status = "done"
                job.result_bytes = session.cache[key]["json"]
            except SpfError as e:
                job.status = "error"
                job.error = {"category": e.category, "message": e.message}

        executor.submit(run)
        return JSONResponse(status_code=202, content={"job_id": job.job_id, "status": job.status})

    @app.get("/jobs/{job_id}")
    async def job_status(job_id: str) -> Response:
        job = jobs.get(job_id)
        if job is None:
            raise _UnknownJobError(f"unknown job: {job_id}")
        doc: dict = {"job_id": job.job_id, "status": job.status}
        if job.status == "done" and job.result_bytes is not None:
            doc["result"] = json.loads(job.result_bytes)
        if job.error is not None:
            doc["error"] = job.error
        return JSONResponse(content=doc)

    @app.get("/sessions/{session_id}/frontier/{point_index}/cohort")
    async def cohort_detail(session_id: str, point_index: int) -> dict:
        session = _session(session_id)
        frontier = session.last_frontier
        if frontier is None:
            raise _NoFrontierError("no frontier computed for this session yet")
        if not (0 <= point_index < len(frontier.points)):
            raise _UnknownPointError(
                f"point index {point_index} out of range [0, {len(frontier.points)})"
            )
        point = frontier.points[point_index]
        k = frontier.provenance.k
        breakdown = target_breakdown(
            session.pool, session.dspec, point.cohort_ids, k
        )
        return {
            "alpha": point.alpha,
            "performance": point.performance,
            "diversity": point.diversity,
            "members": [
                {
                    "id": i,
                    "score": session.pool[i].score,
                    "attributes": dict(session.pool[i].attributes),
                }
                for i in point.cohort_ids
            ],
            "targets": [
                {
                    "kind": row.kind,
                    "attribute": row.attribute,
                    "detail": row.detail,
                    "weight": row.weight,
                    "count": row.count,
                    "threshold": row.threshold,
                    "score": row.score,
                    "met": row.met,
                }
                for row in breakdown
            ],
        }

    @app.post("/sessions/{session_id}/gap")
    async def session_gap(session_id: str, request: Request) -> Response:
        session = _session(session_id)
        body = await request.json()
        ids = list(body["cohort_ids"])
        frontier = session.last_frontier
        if frontier is None:
            raise _NoFrontierError("compute a frontier before requesting gap analysis")
        report = pareto_gap(
            session.pool, frontier, ids, session.dspec, session.pspec, frontier.provenance.k
        )
        return Response(
            content=canonical_json_bytes(gap_report_to_doc(report)),
            media_type="application/json",
        )

    return app
