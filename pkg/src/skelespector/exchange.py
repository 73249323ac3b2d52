"""Structured-text schemas shared by the adapter protocol and session store.

Pose arrays are nested lists ``[[[x, y, confidence] * 17] * T]`` in joint-index
order; frames travel as flat row-major float lists. Both documents are UTF-8
JSON so external adapters need no binary tooling.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .core_types import NUM_JOINTS, SkeletonSequence, VideoClip
from .errors import AdapterProtocolError


def pose_array(seq: SkeletonSequence) -> list[list[list[float]]]:
    """Nested-list encoding of a sequence's joints."""
    return [[[j.x, j.y, j.confidence] for j in pose.joints] for pose in seq.poses]


def sequence_from_pose_array(clip_id: str, variant: str, poses: Any) -> SkeletonSequence:
    """Inverse of pose_array; raises ValueError on malformed input."""
    if not isinstance(poses, list) or not poses:
        raise ValueError("pose array must be a non-empty list of frames")
    coords = np.empty((len(poses), NUM_JOINTS, 2), dtype=np.float64)
    confs = np.empty((len(poses), NUM_JOINTS), dtype=np.float64)
    for t, frame_joints in enumerate(poses):
        if not isinstance(frame_joints, list) or len(frame_joints) != NUM_JOINTS:
            raise ValueError(f"frame {t} must list exactly {NUM_JOINTS} joints")
        for j, triple in enumerate(frame_joints):
            if not isinstance(triple, list) or len(triple) != 3:
                raise ValueError(f"frame {t} joint {j} must be an [x, y, confidence] triple")
            x, y, c = (float(v) for v in triple)
            coords[t, j] = (x, y)
            confs[t, j] = c
    return SkeletonSequence.from_arrays(clip_id, variant, coords, confs)


def frames_flat(clip: VideoClip) -> list[list[float]]:
    return [f.pixels.ravel().tolist() for f in clip.frames]


def clip_from_flat(
    clip_id: str,
    variant: str,
    fps: float,
    height: int,
    width: int,
    channels: int,
    frames: list[list[float]],
) -> VideoClip:
    tensor = np.array(frames, dtype=np.float64).reshape(len(frames), height, width, channels)
    return VideoClip.from_pixels(clip_id, tensor, variant, fps)


def write_adapter_input(clip: VideoClip, path: Path | str) -> None:
    """Write the adapter input document: clip metadata, then flat frames."""
    h, w, c = clip.frame_shape
    doc = {
        "clip_id": clip.clip_id,
        "frame_count": clip.frame_count,
        "height": h,
        "width": w,
        "channels": c,
        "fps": clip.fps,
        "frames": frames_flat(clip),
    }
    Path(path).write_text(json.dumps(doc), encoding="utf-8")


def read_adapter_output(path: Path | str, clip_id: str, frame_count: int) -> SkeletonSequence:
    """Parse an adapter output document into a benign skeleton sequence.

    The document must hold one record per frame with exactly 17 triples.
    Schema violations raise AdapterProtocolError.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise AdapterProtocolError(f"adapter output unreadable: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AdapterProtocolError(f"adapter output is not valid JSON: {exc}") from exc
    poses = doc.get("poses") if isinstance(doc, dict) else doc
    try:
        seq = sequence_from_pose_array(clip_id, "benign", poses)
    except (ValueError, TypeError) as exc:
        raise AdapterProtocolError(f"adapter output malformed: {exc}") from exc
    if seq.frame_count != frame_count:
        raise AdapterProtocolError(f"adapter returned {seq.frame_count} poses for {frame_count} frames")
    return seq
