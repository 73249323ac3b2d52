"""Pose-sequence anomaly metrics.

"Displacement" is the mean over joints of the Euclidean distance a joint
moves between consecutive frames. Joints below the confidence threshold in
either frame of a transition are excluded; transitions with no qualifying
joint become gaps (None) so charts can show breaks instead of fabricated
motion. Spikes are flagged with a median + k*MAD rule, with an absolute
floor fallback when the MAD degenerates to zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core_types import NUM_JOINTS, SkeletonSequence
from .errors import InvalidConfig, ShapeError

DEFAULT_CONFIDENCE_THRESHOLD = 0.05
DEFAULT_SPIKE_K = 3.0
DEFAULT_SPIKE_FLOOR = 1.0
DEFAULT_SEGMENT_WINDOW = 8


@dataclass(frozen=True)
class DisplacementSeries:
    """Per-transition average joint displacement; entry t covers t -> t+1.

    values has length T-1; None marks transitions where no joint cleared the
    confidence threshold in both frames.
    """

    clip_id: str
    variant: str
    values: tuple[float | None, ...]
    confidence_threshold: float

    def __post_init__(self) -> None:
        vals = tuple(None if v is None else float(v) for v in self.values)
        for v in vals:
            if v is not None and v < 0:
                raise ValueError("displacement values must be non-negative")
        object.__setattr__(self, "values", vals)

    def defined(self) -> list[tuple[int, float]]:
        return [(i, v) for i, v in enumerate(self.values) if v is not None]


@dataclass(frozen=True)
class SegmentSummary:
    """Aggregate of the transitions wholly inside one frame window [start, end)."""

    segment_index: int
    start: int
    end: int
    mean_displacement: float | None
    max_displacement: float | None
    thumbnail_frame: int


@dataclass(frozen=True)
class SpikeReport:
    flagged_transitions: tuple[int, ...]
    k: float
    absolute_floor: float


def displacement_series(
    seq: SkeletonSequence, confidence_threshold: float = DEFAULT_CONFIDENCE_THRESHOLD
) -> DisplacementSeries:
    """Mean joint displacement per frame transition, with confidence gating."""
    coords = seq.coords()
    confs = seq.confidences()
    values: list[float | None] = []
    for t in range(seq.frame_count - 1):
        keep = (confs[t] >= confidence_threshold) & (confs[t + 1] >= confidence_threshold)
        if not keep.any():
            values.append(None)
            continue
        dists = np.linalg.norm(coords[t + 1][keep] - coords[t][keep], axis=1)
        values.append(float(dists.mean()))
    return DisplacementSeries(seq.clip_id, seq.variant, tuple(values), confidence_threshold)


def per_joint_displacement(seq: SkeletonSequence, joint: int) -> list[float]:
    """Frame-to-frame Euclidean distance of one joint, ignoring confidence."""
    if not (0 <= joint < NUM_JOINTS):
        raise IndexError(f"joint index {joint} outside [0, {NUM_JOINTS})")
    coords = seq.coords()[:, joint, :]
    return [float(np.linalg.norm(coords[t + 1] - coords[t])) for t in range(len(coords) - 1)]


def deviation_series(benign: SkeletonSequence, adversarial: SkeletonSequence) -> list[float]:
    """Per-frame mean distance between benign and adversarial detections."""
    if benign.frame_count != adversarial.frame_count:
        raise ShapeError(
            f"sequence lengths differ: {benign.frame_count} vs {adversarial.frame_count}"
        )
    a = benign.coords()
    b = adversarial.coords()
    return [float(np.linalg.norm(b[t] - a[t], axis=1).mean()) for t in range(benign.frame_count)]


def detect_spikes(
    series: DisplacementSeries,
    k: float = DEFAULT_SPIKE_K,
    absolute_floor: float = DEFAULT_SPIKE_FLOOR,
) -> SpikeReport:
    """Flag transitions above median + k*MAD of the defined entries.

    MAD = median(|v - median|). A constant series has MAD = 0; then the rule
    falls back to flagging values above median + absolute_floor. Undefined
    entries are never flagged; an empty series yields an empty report.
    """
    if not (k > 0):
        raise InvalidConfig("spike threshold multiplier k must be positive")
    defined = series.defined()
    if not defined:
        return SpikeReport((), k, absolute_floor)
    vals = np.array([v for _, v in defined])
    median = float(np.median(vals))
    mad = float(np.median(np.abs(vals - median)))
    threshold = median + (k * mad if mad > 0 else absolute_floor)
    flagged = tuple(i for i, v in defined if v > threshold)
    return SpikeReport(flagged, k, absolute_floor)


def segment_summaries(
    series: DisplacementSeries, frame_count: int, window: int = DEFAULT_SEGMENT_WINDOW
) -> list[SegmentSummary]:
    """Tile [0, frame_count) into fixed windows and aggregate each one.

    A transition t -> t+1 belongs to a segment only if both frames fall inside
    it; the boundary transition between two segments belongs to neither. The
    last segment may be short. Means/maxima are None when a segment contains
    no defined transition.
    """
    if window < 1:
        raise InvalidConfig("segment window must be >= 1")
    if len(series.values) != frame_count - 1:
        raise ShapeError(
            f"series has {len(series.values)} transitions, expected {frame_count - 1}"
        )
    summaries: list[SegmentSummary] = []
    for index, start in enumerate(range(0, frame_count, window)):
        end = min(start + window, frame_count)
        inside = [series.values[t] for t in range(start, end - 1)]
        defined = [v for v in inside if v is not None]
        summaries.append(
            SegmentSummary(
                segment_index=index,
                start=start,
                end=end,
                mean_displacement=float(np.mean(defined)) if defined else None,
                max_displacement=float(max(defined)) if defined else None,
                thumbnail_frame=(start + end) // 2,
            )
        )
    return summaries
