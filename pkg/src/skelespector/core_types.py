"""Core data model: frames, clips, joints, poses, sequences, predictions.

All types are immutable after construction and safe to share across threads.
Pixels are float64 in [0, 1], row-major, origin top-left; x grows rightward
and y grows downward. Poses follow the fixed 17-keypoint convention below.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ShapeError

KEYPOINT_NAMES: tuple[str, ...] = (
    "nose",
    "left_eye",
    "right_eye",
    "left_ear",
    "right_ear",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
    "left_hip",
    "right_hip",
    "left_knee",
    "right_knee",
    "left_ankle",
    "right_ankle",
)
NUM_JOINTS = len(KEYPOINT_NAMES)

_JOINT_INDEX = {name: i for i, name in enumerate(KEYPOINT_NAMES)}

VARIANTS = ("benign", "adversarial")

MIN_FRAME_EDGE = 8

#: Issue kinds that are reported but do not invalidate a sequence. Attacked
#: detections may legitimately land outside the image.
ADVISORY_ISSUE_KINDS = frozenset({"out_of_frame"})


def joint_index(name: str) -> int:
    """Index of a canonical keypoint name in the fixed 17-joint ordering."""
    try:
        return _JOINT_INDEX[name]
    except KeyError:
        raise KeyError(f"unknown joint name: {name!r}") from None


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Frame:
    """One image of shape (height, width, channels), values in [0, 1].

    channels is 1 (grayscale) or 3 (RGB); height and width are at least 8.
    """

    pixels: np.ndarray

    def __post_init__(self) -> None:
        px = np.ascontiguousarray(np.asarray(self.pixels, dtype=np.float64))
        if px.ndim == 2:
            px = px[:, :, np.newaxis]
        if px.ndim != 3:
            raise ShapeError(f"frame pixels must be (H, W, C), got shape {px.shape}")
        h, w, c = px.shape
        if c not in (1, 3):
            raise ShapeError(f"frame must have 1 or 3 channels, got {c}")
        if h < MIN_FRAME_EDGE or w < MIN_FRAME_EDGE:
            raise ShapeError(f"frame must be at least {MIN_FRAME_EDGE}x{MIN_FRAME_EDGE}, got {h}x{w}")
        if not np.isfinite(px).all():
            raise ValueError("frame pixels must be finite")
        if px.min() < 0.0 or px.max() > 1.0:
            raise ValueError("frame pixels must lie in [0, 1]")
        object.__setattr__(self, "pixels", _frozen(px))

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.pixels.shape


@dataclass(frozen=True)
class VideoClip:
    """Ordered pixel frames of one clip plus provenance metadata.

    fps is playback metadata only; it never enters any computation.
    """

    clip_id: str
    frames: tuple[Frame, ...]
    variant: str = "benign"
    fps: float = 8.0

    def __post_init__(self) -> None:
        _check_variant(self.variant)
        frames = tuple(self.frames)
        if not frames:
            raise ShapeError("a clip needs at least one frame")
        shape = frames[0].shape
        for i, f in enumerate(frames):
            if f.shape != shape:
                raise ShapeError(f"frame {i} has shape {f.shape}, expected {shape}")
        if not (self.fps > 0):
            raise ValueError("fps must be positive")
        object.__setattr__(self, "frames", frames)

    @property
    def frame_count(self) -> int:
        return len(self.frames)

    @property
    def frame_shape(self) -> tuple[int, int, int]:
        return self.frames[0].shape

    def pixel_tensor(self) -> np.ndarray:
        """Writable (T, H, W, C) copy of all frame pixels."""
        return np.stack([f.pixels for f in self.frames])

    @classmethod
    def from_pixels(cls, clip_id: str, pixels: np.ndarray, variant: str = "benign", fps: float = 8.0) -> "VideoClip":
        arr = np.asarray(pixels, dtype=np.float64)
        if arr.ndim != 4:
            raise ShapeError(f"clip pixels must be (T, H, W, C), got shape {arr.shape}")
        return cls(clip_id, tuple(Frame(a) for a in arr), variant, fps)


@dataclass(frozen=True)
class Joint:
    """One detected keypoint: pixel coordinates plus a confidence score.

    Coordinates may lie outside the frame (attacks can push detections
    off-image); range problems are surfaced by validate_sequence, not here.
    """

    x: float
    y: float
    confidence: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "confidence", float(self.confidence))


@dataclass(frozen=True)
class Pose:
    """Exactly 17 joints in the KEYPOINT_NAMES ordering."""

    joints: tuple[Joint, ...]

    def __post_init__(self) -> None:
        joints = tuple(self.joints)
        if len(joints) != NUM_JOINTS:
            raise ShapeError(f"a pose has exactly {NUM_JOINTS} joints, got {len(joints)}")
        object.__setattr__(self, "joints", joints)

    def coords(self) -> np.ndarray:
        """(17, 2) array of (x, y)."""
        return np.array([(j.x, j.y) for j in self.joints], dtype=np.float64)

    def confidences(self) -> np.ndarray:
        return np.array([j.confidence for j in self.joints], dtype=np.float64)

    @classmethod
    def from_arrays(cls, coords: np.ndarray, confidences: np.ndarray | float) -> "Pose":
        coords = np.asarray(coords, dtype=np.float64)
        if coords.shape != (NUM_JOINTS, 2):
            raise ShapeError(f"pose coords must be ({NUM_JOINTS}, 2), got {coords.shape}")
        conf = np.broadcast_to(np.asarray(confidences, dtype=np.float64), (NUM_JOINTS,))
        return cls(tuple(Joint(x, y, c) for (x, y), c in zip(coords, conf)))


@dataclass(frozen=True)
class SkeletonSequence:
    """Per-frame poses detected from one clip; length equals the clip's T."""

    clip_id: str
    variant: str
    poses: tuple[Pose, ...]

    def __post_init__(self) -> None:
        _check_variant(self.variant)
        poses = tuple(self.poses)
        if not poses:
            raise ShapeError("a skeleton sequence needs at least one pose")
        object.__setattr__(self, "poses", poses)

    @property
    def frame_count(self) -> int:
        return len(self.poses)

    def coords(self) -> np.ndarray:
        """(T, 17, 2) array of joint coordinates."""
        return np.stack([p.coords() for p in self.poses])

    def confidences(self) -> np.ndarray:
        """(T, 17) array of joint confidences."""
        return np.stack([p.confidences() for p in self.poses])

    @classmethod
    def from_arrays(
        cls,
        clip_id: str,
        variant: str,
        coords: np.ndarray,
        confidences: np.ndarray | float = 1.0,
    ) -> "SkeletonSequence":
        coords = np.asarray(coords, dtype=np.float64)
        if coords.ndim != 3 or coords.shape[1:] != (NUM_JOINTS, 2):
            raise ShapeError(f"sequence coords must be (T, {NUM_JOINTS}, 2), got {coords.shape}")
        conf = np.broadcast_to(np.asarray(confidences, dtype=np.float64), coords.shape[:2])
        poses = tuple(Pose.from_arrays(c, k) for c, k in zip(coords, conf))
        return cls(clip_id, variant, poses)


@dataclass(frozen=True)
class LabelDistribution:
    """Probabilities over the action classes; `predicted` is the argmax.

    Constructor-enforced: probabilities in [0, 1], summing to 1 within 1e-6;
    argmax ties break toward the lowest index.
    """

    labels: tuple[str, ...]
    probabilities: tuple[float, ...]
    predicted: int = field(init=False)

    def __post_init__(self) -> None:
        labels = tuple(str(s) for s in self.labels)
        probs = tuple(float(p) for p in self.probabilities)
        if len(labels) != len(probs) or not labels:
            raise ShapeError("labels and probabilities must be non-empty and equal-length")
        arr = np.array(probs)
        if not np.isfinite(arr).all() or arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("probabilities must be finite and lie in [0, 1]")
        if abs(arr.sum() - 1.0) > 1e-6:
            raise ValueError(f"probabilities must sum to 1 within 1e-6, got {arr.sum()!r}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "probabilities", probs)
        object.__setattr__(self, "predicted", int(np.argmax(arr)))

    @property
    def predicted_label(self) -> str:
        return self.labels[self.predicted]


@dataclass(frozen=True)
class ValidationIssue:
    frame: int
    joint: int
    kind: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of validate_sequence.

    ok is true iff there are no blocking issues; `out_of_frame` entries are
    advisory and leave ok untouched.
    """

    ok: bool
    issues: tuple[ValidationIssue, ...]

    @classmethod
    def from_issues(cls, issues: Iterable[ValidationIssue]) -> "ValidationReport":
        issues = tuple(issues)
        ok = all(i.kind in ADVISORY_ISSUE_KINDS for i in issues)
        return cls(ok=ok, issues=issues)


def validate_sequence(seq: SkeletonSequence, frame_height: int, frame_width: int) -> ValidationReport:
    """Check confidences, coordinate finiteness and frame bounds per joint.

    Pure: identical inputs yield identical reports. Out-of-frame coordinates
    (outside [0, width-1] x [0, height-1]) are reported but never fatal.
    """
    issues: list[ValidationIssue] = []
    for t, pose in enumerate(seq.poses):
        for j, joint in enumerate(pose.joints):
            if not np.isfinite(joint.confidence) or not (0.0 <= joint.confidence <= 1.0):
                issues.append(
                    ValidationIssue(t, j, "bad_confidence", f"confidence {joint.confidence!r} outside [0, 1]")
                )
            if not (np.isfinite(joint.x) and np.isfinite(joint.y)):
                issues.append(ValidationIssue(t, j, "nonfinite", f"coordinates ({joint.x!r}, {joint.y!r}) not finite"))
            elif not (0.0 <= joint.x <= frame_width - 1 and 0.0 <= joint.y <= frame_height - 1):
                issues.append(
                    ValidationIssue(
                        t,
                        j,
                        "out_of_frame",
                        f"({joint.x:.2f}, {joint.y:.2f}) outside {frame_width}x{frame_height} frame",
                    )
                )
    return ValidationReport.from_issues(issues)
