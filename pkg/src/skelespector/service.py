"""HTTP facade over sessions, frames, metric payloads and attack jobs.

Read endpoints are side-effect-free; responses use canonical JSON (sorted
keys, compact separators) so repeated GETs are byte-identical. Attack jobs
run off the request path, one at a time per clip, concurrently across clips.
"""

from __future__ import annotations

import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from contextlib import asynccontextmanager
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from . import wire
from .errors import (
    AttackInProgress,
    InvalidConfig,
    JobNotFound,
    RangeError,
    StateError,
    UnknownClip,
)
from .pipeline import DEFAULT_MODEL_SEED, run_attack_on_session
from .store import SessionStore, canonical_dumps, render_thumbnail, encode_frame_png
from .viewmodel import monitor_payload, overlap_payload, trajectory_points

JOB_STATUS_ORDER = ("queued", "running", "done", "failed")


class AttackRequest(BaseModel):
    epsilon: float
    mode: str = "untargeted"
    target_label: int | None = None
    iterations: int = 1


@dataclass
class AttackJob:
    """Mutable job record; only JobManager touches it, under its lock."""

    job_id: str
    clip_id: str
    status: str
    config: dict
    error: str | None = None

    def jsonable(self) -> dict:
        return {
            "job_id": self.job_id,
            "clip_id": self.clip_id,
            "status": self.status,
            "config": dict(self.config),
            "error": self.error,
        }


class JobManager:
    """Registers attack jobs and runs them on a small worker pool."""

    def __init__(self, store: SessionStore, model_seed: int = DEFAULT_MODEL_SEED, max_workers: int = 2):
        self._store = store
        self._model_seed = model_seed
        self._jobs: dict[str, AttackJob] = {}
        self._busy_clips: set[str] = set()
        self._lock = threading.Lock()
        self._executor = ThreadPoolExecutor(max_workers=max_workers, thread_name_prefix="attack-job")

    def start(self, clip_id: str, request: AttackRequest) -> dict:
        if not self._store.has(clip_id):
            raise UnknownClip(f"no session for clip {clip_id!r}")
        if request.epsilon < 0:
            raise InvalidConfig(f"epsilon must be >= 0, got {request.epsilon!r}")
        if request.iterations < 1:
            raise InvalidConfig("iterations must be >= 1")
        if request.mode not in ("untargeted", "targeted"):
            raise InvalidConfig(f"mode must be untargeted or targeted, got {request.mode!r}")
        if request.mode == "targeted" and request.target_label is None:
            raise InvalidConfig("targeted mode needs target_label")
        config_echo = {
            "epsilon": request.epsilon,
            "mode": request.mode,
            "target_label": request.target_label,
            "iterations": request.iterations,
        }
        with self._lock:
            if clip_id in self._busy_clips:
                raise AttackInProgress(f"an attack is already running for clip {clip_id!r}")
            job = AttackJob(uuid.uuid4().hex, clip_id, "queued", config_echo)
            self._jobs[job.job_id] = job
            self._busy_clips.add(clip_id)
            snapshot = job.jsonable()
        self._executor.submit(self._run, job.job_id, request)
        return snapshot

    def _advance(self, job_id: str, status: str, error: str | None = None) -> None:
        with self._lock:
            job = self._jobs[job_id]
            # transitions only move forward: queued -> running -> done|failed
            if JOB_STATUS_ORDER.index(status) > JOB_STATUS_ORDER.index(job.status):
                job.status = status
                job.error = error

    def _run(self, job_id: str, request: AttackRequest) -> None:
        clip_id = self._jobs[job_id].clip_id
        self._advance(job_id, "running")
        try:
            session = self._store.load(clip_id)
            updated, _ = run_attack_on_session(
                session,
                epsilon=request.epsilon,
                mode=request.mode,
                target_label=request.target_label,
                iterations=request.iterations,
                seed=self._model_seed,
            )
            self._store.save(updated)
        except Exception as exc:  # job failures are reported, not raised
            self._advance(job_id, "failed", f"{type(exc).__name__}: {exc}")
        else:
            self._advance(job_id, "done")
        finally:
            with self._lock:
                self._busy_clips.discard(clip_id)

    def get(self, job_id: str) -> dict:
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None:
                raise JobNotFound(f"no job {job_id!r}")
            return job.jsonable()

    def shutdown(self) -> None:
        self._executor.shutdown(wait=True)


def _json(data, status_code: int = 200) -> Response:
    return Response(canonical_dumps(data), status_code=status_code, media_type="application/json")


def _png(data: bytes) -> Response:
    return Response(data, media_type="image/png")


def _parse_variant(value: str) -> str:
    if value in ("benign",):
        return "benign"
    if value in ("adv", "adversarial"):
        return "adversarial"
    raise InvalidConfig(f"variant must be benign or adv, got {value!r}")


def create_app(
    data_root: Path | str,
    model_seed: int = DEFAULT_MODEL_SEED,
    ui_dir: Path | str | None = None,
) -> FastAPI:
    store = SessionStore(data_root)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        app.state.jobs.shutdown()

    app = FastAPI(title="skelespector", lifespan=lifespan)
    app.state.store = store
    app.state.jobs = JobManager(store, model_seed)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    def http_error(status: int):
        async def handler(request: Request, exc: Exception):
            return _json({"detail": str(exc)}, status_code=status)

        return handler

    for exc_type, status in (
        (UnknownClip, 404),
        (JobNotFound, 404),
        (StateError, 404),
        (RangeError, 404),
        (FileNotFoundError, 404),
        (InvalidConfig, 400),
        (RequestValidationError, 400),
        (AttackInProgress, 409),
    ):
        app.add_exception_handler(exc_type, http_error(status))

    @app.get("/api/clips")
    async def list_clips():
        return _json(wire.manifest_jsonable(store.manifest()))

    @app.get("/api/clips/{clip_id}")
    async def get_clip(clip_id: str):
        return _json(wire.session_jsonable(store.load(clip_id)))

    def _clip_for_variant(clip_id: str, variant: str):
        session = store.load(clip_id)
        clip = session.benign_clip if variant == "benign" else session.adversarial_clip
        if clip is None:
            raise StateError(f"clip {clip_id!r} has no {variant} frames")
        return session, clip

    @app.get("/api/clips/{clip_id}/frames/{t}")
    async def get_frame(clip_id: str, t: int, variant: str = "benign"):
        _, clip = _clip_for_variant(clip_id, _parse_variant(variant))
        if not (0 <= t < clip.frame_count):
            raise RangeError(f"frame {t} outside [0, {clip.frame_count})")
        return _png(encode_frame_png(clip.frames[t].pixels))

    @app.get("/api/clips/{clip_id}/thumbs/{segment}")
    async def get_thumbnail(clip_id: str, segment: int, window: int = 8, max_edge: int = 64):
        session = store.load(clip_id)
        if window < 1:
            raise InvalidConfig("window must be >= 1")
        T = session.frame_count
        starts = list(range(0, T, window))
        if not (0 <= segment < len(starts)):
            raise RangeError(f"segment {segment} outside [0, {len(starts)})")
        start = starts[segment]
        end = min(start + window, T)
        clip = session.adversarial_clip or session.benign_clip
        return _png(render_thumbnail(clip, (start + end) // 2, max_edge))

    @app.get("/api/clips/{clip_id}/poses")
    async def get_poses(clip_id: str, variant: str = "benign"):
        parsed = _parse_variant(variant)
        session = store.load(clip_id)
        seq = session.benign_sequence if parsed == "benign" else session.adversarial_sequence
        if seq is None:
            raise StateError(f"clip {clip_id!r} has no detected {parsed} sequence")
        return _json(wire.sequence_jsonable(seq))

    @app.get("/api/clips/{clip_id}/monitor")
    async def get_monitor(clip_id: str):
        return _json(wire.monitor_jsonable(monitor_payload(store.load(clip_id))))

    @app.get("/api/clips/{clip_id}/overlap/{t}")
    async def get_overlap(clip_id: str, t: int):
        return _json(wire.overlap_jsonable(overlap_payload(store.load(clip_id), t)))

    @app.get("/api/clips/{clip_id}/trajectory/{joint}")
    async def get_trajectory(
        clip_id: str,
        joint: int,
        variant: str = "benign",
        # `from` is reserved in Python; the query parameter keeps its spec name
        from_: int | None = Query(None, alias="from"),
        to: int | None = None,
    ):
        parsed = _parse_variant(variant)
        session = store.load(clip_id)
        seq = session.benign_sequence if parsed == "benign" else session.adversarial_sequence
        if seq is None:
            raise StateError(f"clip {clip_id!r} has no detected {parsed} sequence")
        if not (0 <= joint < 17):
            raise InvalidConfig(f"joint must be in [0, 17), got {joint}")
        lo = 0 if from_ is None else from_
        hi = seq.frame_count if to is None else to
        try:
            points = trajectory_points(seq, joint, lo, hi)
        except RangeError as exc:
            # bad query values are client errors, not missing resources
            raise InvalidConfig(str(exc)) from exc
        return _json(wire.trajectory_jsonable(points))

    @app.post("/api/clips/{clip_id}/attacks", status_code=202)
    async def post_attack(clip_id: str, request: AttackRequest):
        return _json(app.state.jobs.start(clip_id, request), status_code=202)

    @app.get("/api/jobs/{job_id}")
    async def get_job(job_id: str):
        return _json(app.state.jobs.get(job_id))

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def serve(
    host: str = "127.0.0.1",
    port: int = 8008,
    data_root: Path | str = "data",
    model_seed: int = DEFAULT_MODEL_SEED,
    ui_dir: Path | str | None = None,
) -> None:
    """Run the service until interrupted; raises on startup failure."""
    import uvicorn

    uvicorn.run(create_app(data_root, model_seed, ui_dir), host=host, port=port, log_level="info")
