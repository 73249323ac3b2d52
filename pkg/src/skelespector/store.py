"""Ingestion, persistence and bit-exact serialization of analysis sessions.

On-disk layout per clip: ``<data_root>/<clip_id>/session.json`` plus
``frames_benign/``, ``frames_adv/`` and ``thumbs/`` PNG directories. The JSON
document is the source of truth: floats are serialized by Python's shortest
round-tripping repr, so load(save(s)) == s holds field-for-field. The PNG
directories are 8-bit renders for humans and the UI, never read back.

session.json carries a mandatory schema_version and a sha256 checksum over
its canonical payload; saves go through a temp file + atomic rename so a
crash never corrupts an existing session.
"""

from __future__ import annotations

import hashlib
import io
import json
import os
import re
import threading
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from . import exchange
from .attack import AttackConfig, AttackRecord
from .core_types import Frame, LabelDistribution, SkeletonSequence, VideoClip
from .errors import (
    CorruptSession,
    EmptyDirectory,
    InconsistentDimensions,
    InvalidConfig,
    RangeError,
    SchemaMismatch,
    UnknownClip,
    UnreadableImage,
)
from .metrics import DEFAULT_SEGMENT_WINDOW
from .models import LossSpec

SCHEMA_VERSION = 1

SESSION_FILENAME = "session.json"

DEFAULT_THUMB_EDGE = 64

_FRAME_FILE_RE = re.compile(r"^frame_\d{5}\.(png|pgm)$")

_CLIP_ID_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.\-]*$")


@dataclass(frozen=True)
class AnalysisSession:
    """The persisted unit the service and UI operate on.

    The adversarial members (clip, sequence, prediction, attack config) are
    all present or all absent; benign sequence/prediction appear once a model
    has run on the clip.
    """

    clip_id: str
    benign_clip: VideoClip
    adversarial_clip: VideoClip | None = None
    benign_sequence: SkeletonSequence | None = None
    adversarial_sequence: SkeletonSequence | None = None
    benign_prediction: LabelDistribution | None = None
    adversarial_prediction: LabelDistribution | None = None
    attack: AttackConfig | None = None
    created_at: str = ""
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self) -> None:
        adversarial_members = (
            self.adversarial_clip,
            self.adversarial_sequence,
            self.adversarial_prediction,
            self.attack,
        )
        present = [m is not None for m in adversarial_members]
        if any(present) and not all(present):
            raise ValueError("adversarial clip/sequence/prediction/attack must be all present or all absent")
        if not self.created_at:
            object.__setattr__(self, "created_at", datetime.now(timezone.utc).isoformat())

    @property
    def has_adversarial(self) -> bool:
        return self.adversarial_clip is not None

    @property
    def frame_count(self) -> int:
        return self.benign_clip.frame_count

    def labels(self) -> tuple[str, ...]:
        if self.benign_prediction is not None:
            return self.benign_prediction.labels
        return ()


@dataclass(frozen=True)
class ManifestEntry:
    clip_id: str
    frame_count: int
    height: int
    width: int
    channels: int
    has_adversarial: bool
    labels: tuple[str, ...]


@dataclass(frozen=True)
class SessionManifest:
    entries: tuple[ManifestEntry, ...]

    def __post_init__(self) -> None:
        ids = [e.clip_id for e in self.entries]
        if len(ids) != len(set(ids)):
            raise ValueError("manifest clip ids must be unique")


def canonical_dumps(obj) -> str:
    """Deterministic JSON: sorted keys, compact separators, strict floats."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


# --- frame ingestion ---------------------------------------------------------


def _load_image(path: Path) -> np.ndarray:
    try:
        with Image.open(path) as img:
            if img.mode in ("1", "L", "I", "I;16", "LA"):
                img = img.convert("L")
                arr = np.asarray(img, dtype=np.float64)[:, :, np.newaxis]
            else:
                img = img.convert("RGB")
                arr = np.asarray(img, dtype=np.float64)
    except (OSError, UnidentifiedImageError, ValueError) as exc:
        raise UnreadableImage(f"cannot decode {path.name}: {exc}") from exc
    return arr / 255.0


def ingest_frames(directory: Path | str, clip_id: str, variant: str = "benign", fps: float = 8.0) -> VideoClip:
    """Load ``frame_%05d.png/.pgm`` files (sorted by name) into one clip.

    Pixels are scaled from 8-bit to [0, 1]; all frames must agree on size and
    channel count.
    """
    directory = Path(directory)
    names = sorted(p for p in directory.iterdir() if p.is_file() and _FRAME_FILE_RE.match(p.name))
    if not names:
        raise EmptyDirectory(f"no frame_%05d.png/.pgm files in {directory}")
    frames: list[Frame] = []
    shape: tuple[int, int, int] | None = None
    for path in names:
        arr = _load_image(path)
        if shape is None:
            shape = arr.shape
        elif arr.shape != shape:
            raise InconsistentDimensions(f"{path.name} has shape {arr.shape}, expected {shape}")
        frames.append(Frame(arr))
    return VideoClip(clip_id, tuple(frames), variant, fps)


# --- PNG rendering -----------------------------------------------------------


def encode_frame_png(pixels: np.ndarray) -> bytes:
    """Quantize [0, 1] pixels to 8 bit and encode as PNG."""
    arr = np.round(np.asarray(pixels) * 255.0).astype(np.uint8)
    if arr.shape[2] == 1:
        img = Image.fromarray(arr[:, :, 0], "L")
    else:
        img = Image.fromarray(arr, "RGB")
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def _nearest_indices(dst: int, src: int) -> np.ndarray:
    return np.minimum((np.floor((np.arange(dst) + 0.5) * src / dst)).astype(int), src - 1)


def render_thumbnail(clip: VideoClip, t: int, max_edge: int = DEFAULT_THUMB_EDGE) -> bytes:
    """PNG bytes of frame t, nearest-neighbor downscaled so the longer edge
    equals max_edge. Frames already small enough pass through unscaled."""
    if not (0 <= t < clip.frame_count):
        raise RangeError(f"frame index {t} outside [0, {clip.frame_count})")
    if max_edge < 1:
        raise InvalidConfig("max_edge must be >= 1")
    px = clip.frames[t].pixels
    h, w = px.shape[:2]
    longer = max(h, w)
    if longer > max_edge:
        if h >= w:
            nh, nw = max_edge, max(1, round(w * max_edge / h))
        else:
            nh, nw = max(1, round(h * max_edge / w)), max_edge
        px = px[_nearest_indices(nh, h)][:, _nearest_indices(nw, w)]
    return encode_frame_png(px)


# --- session documents -------------------------------------------------------


def _clip_doc(clip: VideoClip) -> dict:
    return {"variant": clip.variant, "frames": exchange.frames_flat(clip)}


def _sequence_doc(seq: SkeletonSequence) -> dict:
    return {"variant": seq.variant, "poses": exchange.pose_array(seq)}


def _prediction_doc(pred: LabelDistribution) -> dict:
    return {"labels": list(pred.labels), "probabilities": list(pred.probabilities)}


def _attack_doc(config: AttackConfig) -> dict:
    return {
        "epsilon": config.epsilon,
        "mode": config.loss.mode,
        "reference_label": config.loss.reference_label,
        "iterations": config.iterations,
    }


def session_payload(session: AnalysisSession) -> dict:
    """The checksummed JSON payload for one session."""
    h, w, c = session.benign_clip.frame_shape
    return {
        "schema_version": session.schema_version,
        "clip_id": session.clip_id,
        "created_at": session.created_at,
        "fps": session.benign_clip.fps,
        "height": h,
        "width": w,
        "channels": c,
        "frame_count": session.benign_clip.frame_count,
        "benign_clip": _clip_doc(session.benign_clip),
        "adversarial_clip": _clip_doc(session.adversarial_clip) if session.adversarial_clip else None,
        "benign_sequence": _sequence_doc(session.benign_sequence) if session.benign_sequence else None,
        "adversarial_sequence": (
            _sequence_doc(session.adversarial_sequence) if session.adversarial_sequence else None
        ),
        "benign_prediction": _prediction_doc(session.benign_prediction) if session.benign_prediction else None,
        "adversarial_prediction": (
            _prediction_doc(session.adversarial_prediction) if session.adversarial_prediction else None
        ),
        "attack": _attack_doc(session.attack) if session.attack else None,
    }


def _checksum(payload: dict) -> str:
    return hashlib.sha256(canonical_dumps(payload).encode("utf-8")).hexdigest()


def _session_from_payload(doc: dict) -> AnalysisSession:
    clip_id = doc["clip_id"]
    h, w, c = doc["height"], doc["width"], doc["channels"]
    fps = doc["fps"]

    def load_clip(entry) -> VideoClip | None:
        if entry is None:
            return None
        return exchange.clip_from_flat(clip_id, entry["variant"], fps, h, w, c, entry["frames"])

    def load_sequence(entry) -> SkeletonSequence | None:
        if entry is None:
            return None
        return exchange.sequence_from_pose_array(clip_id, entry["variant"], entry["poses"])

    def load_prediction(entry) -> LabelDistribution | None:
        if entry is None:
            return None
        return LabelDistribution(tuple(entry["labels"]), tuple(entry["probabilities"]))

    attack_entry = doc["attack"]
    attack = None
    if attack_entry is not None:
        attack = AttackConfig(
            epsilon=attack_entry["epsilon"],
            loss=LossSpec(attack_entry["mode"], attack_entry["reference_label"]),
            iterations=attack_entry["iterations"],
        )
    return AnalysisSession(
        clip_id=clip_id,
        benign_clip=load_clip(doc["benign_clip"]),
        adversarial_clip=load_clip(doc["adversarial_clip"]),
        benign_sequence=load_sequence(doc["benign_sequence"]),
        adversarial_sequence=load_sequence(doc["adversarial_sequence"]),
        benign_prediction=load_prediction(doc["benign_prediction"]),
        adversarial_prediction=load_prediction(doc["adversarial_prediction"]),
        attack=attack,
        created_at=doc["created_at"],
        schema_version=doc["schema_version"],
    )


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(f".{path.name}.tmp-{os.getpid()}")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def save_session(session: AnalysisSession, data_root: Path | str) -> Path:
    """Persist a session under ``<data_root>/<clip_id>/``; returns session.json.

    Frame and thumbnail PNGs are written first; the session.json rename is
    the commit point, so interrupted saves leave any previous session intact.
    """
    root = Path(data_root)
    clip_dir = root / session.clip_id
    clip_dir.mkdir(parents=True, exist_ok=True)

    def write_frames(clip: VideoClip, subdir: str) -> None:
        frame_dir = clip_dir / subdir
        frame_dir.mkdir(exist_ok=True)
        for i, frame in enumerate(clip.frames):
            _atomic_write(frame_dir / f"frame_{i:05d}.png", encode_frame_png(frame.pixels))

    write_frames(session.benign_clip, "frames_benign")
    thumb_source = session.benign_clip
    if session.adversarial_clip is not None:
        write_frames(session.adversarial_clip, "frames_adv")
        thumb_source = session.adversarial_clip

    thumb_dir = clip_dir / "thumbs"
    thumb_dir.mkdir(exist_ok=True)
    T = session.frame_count
    for index, start in enumerate(range(0, T, DEFAULT_SEGMENT_WINDOW)):
        end = min(start + DEFAULT_SEGMENT_WINDOW, T)
        data = render_thumbnail(thumb_source, (start + end) // 2)
        _atomic_write(thumb_dir / f"segment_{index:03d}.png", data)

    payload = session_payload(session)
    doc = dict(payload)
    doc["checksum"] = _checksum(payload)
    path = clip_dir / SESSION_FILENAME
    _atomic_write(path, (json.dumps(doc, sort_keys=True) + "\n").encode("utf-8"))
    return path


def load_session(path: Path | str) -> AnalysisSession:
    """Load a session from a session.json file (or its clip directory)."""
    path = Path(path)
    if path.is_dir():
        path = path / SESSION_FILENAME
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise UnknownClip(f"no session at {path}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptSession(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise CorruptSession(f"{path} does not hold a session document")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaMismatch(f"unsupported schema_version {version!r}, expected {SCHEMA_VERSION}")
    stored_checksum = doc.pop("checksum", None)
    if stored_checksum != _checksum(doc):
        raise CorruptSession(f"{path} failed its checksum")
    try:
        return _session_from_payload(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptSession(f"{path} holds inconsistent data: {exc}") from exc


class SessionStore:
    """Data-root-scoped persistence facade with per-clip write locks.

    Reads are lock-free (saves are atomic); writes to one clip id are
    serialized in-process, matching the one-job-per-clip service policy.
    """

    def __init__(self, data_root: Path | str):
        self.data_root = Path(data_root)
        self.data_root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _lock_for(self, clip_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(clip_id, threading.Lock())

    @staticmethod
    def check_clip_id(clip_id: str) -> str:
        if not _CLIP_ID_RE.match(clip_id):
            raise InvalidConfig(f"invalid clip id {clip_id!r}")
        return clip_id

    def session_path(self, clip_id: str) -> Path:
        return self.data_root / clip_id / SESSION_FILENAME

    def has(self, clip_id: str) -> bool:
        return self.session_path(clip_id).is_file()

    def clip_ids(self) -> list[str]:
        if not self.data_root.is_dir():
            return []
        return sorted(p.parent.name for p in self.data_root.glob(f"*/{SESSION_FILENAME}"))

    def load(self, clip_id: str) -> AnalysisSession:
        if not self.has(clip_id):
            raise UnknownClip(f"no session for clip {clip_id!r}")
        return load_session(self.session_path(clip_id))

    def save(self, session: AnalysisSession) -> Path:
        self.check_clip_id(session.clip_id)
        with self._lock_for(session.clip_id):
            return save_session(session, self.data_root)

    def ingest(self, frames_dir: Path | str, clip_id: str, fps: float = 8.0) -> AnalysisSession:
        """Ingest a frame directory as a fresh benign-only session and persist it."""
        self.check_clip_id(clip_id)
        clip = ingest_frames(frames_dir, clip_id, "benign", fps)
        session = AnalysisSession(clip_id=clip_id, benign_clip=clip)
        self.save(session)
        return session

    def manifest(self) -> SessionManifest:
        entries = []
        for clip_id in self.clip_ids():
            session = self.load(clip_id)
            h, w, c = session.benign_clip.frame_shape
            entries.append(
                ManifestEntry(
                    clip_id=clip_id,
                    frame_count=session.frame_count,
                    height=h,
                    width=w,
                    channels=c,
                    has_adversarial=session.has_adversarial,
                    labels=session.labels(),
                )
            )
        return SessionManifest(tuple(entries))


def session_with_attack(session: AnalysisSession, record) -> AnalysisSession:
    """New session carrying an attack record's clips, sequences and predictions."""
    return replace(
        session,
        adversarial_clip=record.adversarial_clip,
        benign_sequence=record.benign_sequence,
        adversarial_sequence=record.adversarial_sequence,
        benign_prediction=record.benign_prediction,
        adversarial_prediction=record.adversarial_prediction,
        attack=record.config,
    )


def session_attack_record(session: AnalysisSession) -> AttackRecord | None:
    """Rebuild the AttackRecord held inside a completed session, or None."""
    if not session.has_adversarial:
        return None
    return AttackRecord(
        benign_clip=session.benign_clip,
        adversarial_clip=session.adversarial_clip,
        config=session.attack,
        benign_prediction=session.benign_prediction,
        adversarial_prediction=session.adversarial_prediction,
        benign_sequence=session.benign_sequence,
        adversarial_sequence=session.adversarial_sequence,
    )
