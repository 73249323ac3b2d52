"""JSON-able views of domain objects, shared by the HTTP service and the CLI.

Every converter returns plain dict/list/scalar structures whose floats
round-trip exactly through json (shortest-repr serialization), so comparing
a deserialized response against a converter's direct output is exact.
"""

from __future__ import annotations

from . import exchange
from .attack import AttackConfig, AttackEvaluation
from .core_types import KEYPOINT_NAMES, LabelDistribution, Pose, SkeletonSequence
from .metrics import DisplacementSeries, SegmentSummary, SpikeReport
from .store import AnalysisSession, ManifestEntry, SessionManifest
from .viewmodel import MonitorPayload, OverlapPayload, TrajectoryPoint


def pose_jsonable(pose: Pose) -> list[list[float]]:
    return [[j.x, j.y, j.confidence] for j in pose.joints]


def sequence_jsonable(seq: SkeletonSequence) -> dict:
    return {"clip_id": seq.clip_id, "variant": seq.variant, "poses": exchange.pose_array(seq)}


def prediction_jsonable(pred: LabelDistribution) -> dict:
    return {
        "labels": list(pred.labels),
        "probabilities": list(pred.probabilities),
        "predicted": pred.predicted,
        "predicted_label": pred.predicted_label,
    }


def attack_config_jsonable(config: AttackConfig) -> dict:
    return {
        "epsilon": config.epsilon,
        "mode": config.loss.mode,
        "reference_label": config.loss.reference_label,
        "iterations": config.iterations,
    }


def evaluation_jsonable(ev: AttackEvaluation) -> dict:
    return {
        "success": ev.success,
        "linf_norm": ev.linf_norm,
        "l2_norm": ev.l2_norm,
        "benign_label": ev.benign_label,
        "adversarial_label": ev.adversarial_label,
    }


def series_jsonable(series: DisplacementSeries) -> dict:
    return {
        "clip_id": series.clip_id,
        "variant": series.variant,
        "confidence_threshold": series.confidence_threshold,
        "values": list(series.values),
    }


def segment_jsonable(seg: SegmentSummary) -> dict:
    return {
        "segment_index": seg.segment_index,
        "start": seg.start,
        "end": seg.end,
        "mean_displacement": seg.mean_displacement,
        "max_displacement": seg.max_displacement,
        "thumbnail_frame": seg.thumbnail_frame,
    }


def spikes_jsonable(report: SpikeReport) -> dict:
    return {
        "flagged_transitions": list(report.flagged_transitions),
        "k": report.k,
        "absolute_floor": report.absolute_floor,
    }


def monitor_jsonable(payload: MonitorPayload) -> dict:
    return {
        "clip_id": payload.clip_id,
        "frame_count": payload.frame_count,
        "window": payload.window,
        "benign_series": series_jsonable(payload.benign_series),
        "adversarial_series": series_jsonable(payload.adversarial_series),
        "segments": [segment_jsonable(s) for s in payload.segments],
        "spikes": spikes_jsonable(payload.spikes),
        "benign_prediction": prediction_jsonable(payload.benign_prediction),
        "adversarial_prediction": prediction_jsonable(payload.adversarial_prediction),
    }


def overlap_jsonable(payload: OverlapPayload) -> dict:
    return {
        "frame_index": payload.frame_index,
        "benign_pose": pose_jsonable(payload.benign_pose),
        "adversarial_pose": pose_jsonable(payload.adversarial_pose),
        "image_variant": payload.image_variant,
    }


def trajectory_jsonable(points: list[TrajectoryPoint]) -> list[dict]:
    return [{"frame": p.frame, "x": p.x, "y": p.y, "alpha": p.alpha} for p in points]


def manifest_entry_jsonable(entry: ManifestEntry) -> dict:
    return {
        "clip_id": entry.clip_id,
        "frame_count": entry.frame_count,
        "height": entry.height,
        "width": entry.width,
        "channels": entry.channels,
        "has_adversarial": entry.has_adversarial,
        "labels": list(entry.labels),
    }


def manifest_jsonable(manifest: SessionManifest) -> list[dict]:
    return [manifest_entry_jsonable(e) for e in manifest.entries]


def session_jsonable(session: AnalysisSession) -> dict:
    """Session view without pixel data, as served by GET /api/clips/{id}."""
    h, w, c = session.benign_clip.frame_shape
    return {
        "clip_id": session.clip_id,
        "created_at": session.created_at,
        "schema_version": session.schema_version,
        "fps": session.benign_clip.fps,
        "frame_count": session.frame_count,
        "height": h,
        "width": w,
        "channels": c,
        "has_adversarial": session.has_adversarial,
        "joint_names": list(KEYPOINT_NAMES),
        "labels": list(session.labels()),
        "benign_sequence": sequence_jsonable(session.benign_sequence) if session.benign_sequence else None,
        "adversarial_sequence": (
            sequence_jsonable(session.adversarial_sequence) if session.adversarial_sequence else None
        ),
        "benign_prediction": (
            prediction_jsonable(session.benign_prediction) if session.benign_prediction else None
        ),
        "adversarial_prediction": (
            prediction_jsonable(session.adversarial_prediction) if session.adversarial_prediction else None
        ),
        "attack": attack_config_jsonable(session.attack) if session.attack else None,
    }
