"""Render-ready payloads for the UI: trajectories, overlap pairs, monitor bundle.

Pure functions over a frozen session snapshot; nothing here mutates state or
recomputes what `metrics` already defines.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core_types import NUM_JOINTS, LabelDistribution, Pose, SkeletonSequence
from .errors import RangeError, StateError
from .metrics import (
    DEFAULT_CONFIDENCE_THRESHOLD,
    DEFAULT_SEGMENT_WINDOW,
    DEFAULT_SPIKE_K,
    DisplacementSeries,
    SegmentSummary,
    SpikeReport,
    detect_spikes,
    displacement_series,
    segment_summaries,
)

#: Opacity of the oldest dot in a trajectory; the newest is always 1.
ALPHA_MIN = 0.15

#: Joint selected on first load: the left ankle, whose attacked trajectory is
#: the headline demonstration.
DEFAULT_JOINT = 15


@dataclass(frozen=True)
class TrajectoryPoint:
    """One dot of a joint trajectory; alpha encodes time (newer = more opaque)."""

    frame: int
    x: float
    y: float
    alpha: float


@dataclass(frozen=True)
class OverlapPayload:
    """Both poses at one frame, drawn over the adversarial frame image."""

    frame_index: int
    benign_pose: Pose
    adversarial_pose: Pose
    image_variant: str = "adversarial"


@dataclass(frozen=True)
class MonitorPayload:
    """Everything the monitor view draws: series, segments, spikes, predictions."""

    clip_id: str
    frame_count: int
    window: int
    benign_series: DisplacementSeries
    adversarial_series: DisplacementSeries
    segments: tuple[SegmentSummary, ...]
    spikes: SpikeReport
    benign_prediction: LabelDistribution
    adversarial_prediction: LabelDistribution


def trajectory_points(
    seq: SkeletonSequence,
    joint: int,
    start: int,
    stop: int,
    alpha_min: float = ALPHA_MIN,
) -> list[TrajectoryPoint]:
    """Dots for one joint over frames [start, stop) with a linear alpha ramp.

    alpha_i = alpha_min + (1 - alpha_min) * i / (n - 1) for the i-th of n
    points; a single point gets alpha 1. The last point's alpha is exactly 1.
    """
    if not (0 <= joint < NUM_JOINTS):
        raise IndexError(f"joint index {joint} outside [0, {NUM_JOINTS})")
    if not (0 <= start < stop <= seq.frame_count):
        raise RangeError(f"bad frame range [{start}, {stop}) for T={seq.frame_count}")
    n = stop - start
    points = []
    for i, t in enumerate(range(start, stop)):
        alpha = 1.0 if i == n - 1 else alpha_min + (1.0 - alpha_min) * i / (n - 1)
        j = seq.poses[t].joints[joint]
        points.append(TrajectoryPoint(frame=t, x=j.x, y=j.y, alpha=alpha))
    return points


def overlap_payload(session, t: int) -> OverlapPayload:
    """Benign and adversarial poses at frame t, for same-frame superposition.

    Accepts any object with benign_sequence/adversarial_sequence attributes
    (an AnalysisSession in practice). All failures surface as StateError.
    """
    benign = session.benign_sequence
    adversarial = session.adversarial_sequence
    if benign is None or adversarial is None:
        raise StateError("session holds no detected sequences for both variants")
    if not (0 <= t < benign.frame_count):
        raise StateError(f"frame index {t} outside [0, {benign.frame_count})")
    return OverlapPayload(
        frame_index=t,
        benign_pose=benign.poses[t],
        adversarial_pose=adversarial.poses[t],
    )


def monitor_payload(
    session,
    confidence_threshold: float = DEFAULT_CONFIDENCE_THRESHOLD,
    window: int = DEFAULT_SEGMENT_WINDOW,
    spike_k: float = DEFAULT_SPIKE_K,
) -> MonitorPayload:
    """Bundle both displacement series, segments, spikes and predictions.

    Series come straight from `metrics`; segments and spikes are computed on
    the adversarial series, where the attack signature lives.
    """
    if session.benign_sequence is None or session.adversarial_sequence is None:
        raise StateError("monitor view needs both benign and adversarial sequences")
    if session.benign_prediction is None or session.adversarial_prediction is None:
        raise StateError("monitor view needs predictions for both variants")
    benign_series = displacement_series(session.benign_sequence, confidence_threshold)
    adversarial_series = displacement_series(session.adversarial_sequence, confidence_threshold)
    frame_count = session.benign_sequence.frame_count
    segments = tuple(segment_summaries(adversarial_series, frame_count, window))
    spikes = detect_spikes(adversarial_series, spike_k)
    return MonitorPayload(
        clip_id=session.clip_id,
        frame_count=frame_count,
        window=window,
        benign_series=benign_series,
        adversarial_series=adversarial_series,
        segments=segments,
        spikes=spikes,
        benign_prediction=session.benign_prediction,
        adversarial_prediction=session.adversarial_prediction,
    )
