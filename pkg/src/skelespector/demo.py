"""Packaged demo fixture: one command reproduces the attack spike end to end.

The fixture is a 32x32 grayscale clip of a synthetic figure that sways less
than a pixel per frame. Each joint coordinate is encoded into a dedicated
pixel of a two-row strip at the top of every frame, and the linear detector
reads exactly those pixels back, so detections are controllable yet the
attack below is a genuine gradient attack, not a scripted jitter.

The classifier puts weight only on the left ankle's x coordinate in frames
10..15, with alternating signs. The signed-gradient step at epsilon = 0.03
therefore touches six pixels in the whole clip, kicks the detected ankle
+/-12 px in alternating directions across transitions 10..14, and flips the
prediction from "lunge" to "exercising with exercise ball".
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .attack import AttackConfig, fgm_attack
from .core_types import NUM_JOINTS, VideoClip, joint_index
from .models import EndToEndModel, LossSpec, ToyLinearActionClassifier, ToyLinearPoseDetector
from .pipeline import DEFAULT_LABELS
from .store import AnalysisSession, SessionStore, session_with_attack

DEMO_CLIP_ID = "demo"
DEMO_SEED = 7
DEMO_FRAME_COUNT = 32
DEMO_EDGE = 32
DEMO_FPS = 8.0
DEMO_EPSILON = 0.03

#: Frames whose ankle-x coordinate carries classifier weight; the attacked
#: transitions are 10..14 (between consecutive attacked frames).
DEMO_ATTACK_FRAMES = tuple(range(10, 16))

ANKLE = joint_index("left_ankle")

# Coordinate -> pixel encoding scales. The ankle-x scale is large so a
# +/-epsilon pixel step moves the detection by epsilon * scale = 12 px.
_COORD_SCALE = 64.0
_ANKLE_X_SCALE = 400.0
_CLASSIFIER_GAIN = 0.05
_BIAS = (2.0, 0.0, -2.0, -2.0)

_BASE_POSE = {
    "nose": (16.0, 5.0),
    "left_eye": (17.0, 4.0),
    "right_eye": (15.0, 4.0),
    "left_ear": (18.0, 5.0),
    "right_ear": (14.0, 5.0),
    "left_shoulder": (19.0, 9.0),
    "right_shoulder": (13.0, 9.0),
    "left_elbow": (21.0, 13.0),
    "right_elbow": (11.0, 13.0),
    "left_wrist": (21.0, 16.0),
    "right_wrist": (11.0, 16.0),
    "left_hip": (18.0, 17.0),
    "right_hip": (14.0, 17.0),
    "left_knee": (18.0, 22.0),
    "right_knee": (14.0, 22.0),
    "left_ankle": (18.0, 27.0),
    "right_ankle": (14.0, 27.0),
}


def _coordinate_scales() -> np.ndarray:
    scales = np.full((NUM_JOINTS, 2), _COORD_SCALE)
    scales[ANKLE, 0] = _ANKLE_X_SCALE
    return scales


def demo_joint_tracks(seed: int = DEMO_SEED) -> np.ndarray:
    """(T, 17, 2) benign coordinates: base pose plus sub-pixel sway."""
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(NUM_JOINTS, 2))
    base = np.array([_BASE_POSE[name] for name in sorted(_BASE_POSE, key=joint_index)])
    t = np.arange(DEMO_FRAME_COUNT)[:, None]
    angle = 2.0 * np.pi * t / DEMO_FRAME_COUNT
    tracks = np.empty((DEMO_FRAME_COUNT, NUM_JOINTS, 2))
    tracks[:, :, 0] = base[:, 0] + 0.6 * np.sin(angle + phases[:, 0])
    tracks[:, :, 1] = base[:, 1] + 0.4 * np.cos(angle + phases[:, 1])
    return tracks


def build_demo_detector() -> ToyLinearPoseDetector:
    """Linear detector reading each coordinate from its strip pixel."""
    weights = np.zeros((NUM_JOINTS, 2, DEMO_EDGE, DEMO_EDGE, 1))
    scales = _coordinate_scales()
    for j in range(NUM_JOINTS):
        weights[j, 0, 0, j, 0] = scales[j, 0]  # row 0: x readouts
        weights[j, 1, 1, j, 0] = scales[j, 1]  # row 1: y readouts
    return ToyLinearPoseDetector(weights)


def build_demo_classifier() -> ToyLinearActionClassifier:
    """Weight only the ankle-x coordinate of the attacked frames, signs alternating."""
    dim = DEMO_FRAME_COUNT * NUM_JOINTS * 2
    weights = np.zeros((len(DEFAULT_LABELS), dim))
    for t in DEMO_ATTACK_FRAMES:
        sign = 1.0 if (t - DEMO_ATTACK_FRAMES[0]) % 2 == 0 else -1.0
        col = t * NUM_JOINTS * 2 + ANKLE * 2  # flattened (t, joint, x)
        weights[0, col] = -_CLASSIFIER_GAIN * sign
        weights[1, col] = _CLASSIFIER_GAIN * sign
    return ToyLinearActionClassifier(DEFAULT_LABELS, weights, np.array(_BIAS), DEMO_FRAME_COUNT)


def build_demo_model() -> EndToEndModel:
    return EndToEndModel(build_demo_detector(), build_demo_classifier())


def _draw_blob(frame: np.ndarray, x: float, y: float) -> None:
    cx, cy = int(round(x)), int(round(y))
    for dx, dy, value in ((0, 0, 0.95), (1, 0, 0.55), (-1, 0, 0.55), (0, 1, 0.55), (0, -1, 0.55)):
        px, py = cx + dx, cy + dy
        # rows 0-1 are the coordinate strip; keep drawings off them
        if 0 <= px < DEMO_EDGE and 2 <= py < DEMO_EDGE:
            frame[py, px, 0] = max(frame[py, px, 0], value)


def build_demo_clip(seed: int = DEMO_SEED, clip_id: str = DEMO_CLIP_ID) -> VideoClip:
    """Benign clip: gradient backdrop, joint blobs, and the coordinate strip."""
    tracks = demo_joint_tracks(seed)
    scales = _coordinate_scales()
    frames = np.empty((DEMO_FRAME_COUNT, DEMO_EDGE, DEMO_EDGE, 1))
    backdrop = 0.08 + 0.25 * (np.arange(DEMO_EDGE) / (DEMO_EDGE - 1))
    for t in range(DEMO_FRAME_COUNT):
        frame = np.repeat(backdrop[:, None], DEMO_EDGE, axis=1)[:, :, None].copy()
        for j in range(NUM_JOINTS):
            _draw_blob(frame, tracks[t, j, 0], tracks[t, j, 1])
        frame[0, :NUM_JOINTS, 0] = tracks[t, :, 0] / scales[:, 0]
        frame[1, :NUM_JOINTS, 0] = tracks[t, :, 1] / scales[:, 1]
        frames[t] = frame
    return VideoClip.from_pixels(clip_id, frames, "benign", DEMO_FPS)


def build_demo_session(
    data_root: Path | str,
    clip_id: str = DEMO_CLIP_ID,
    seed: int = DEMO_SEED,
    epsilon: float = DEMO_EPSILON,
) -> AnalysisSession:
    """Build the fixture, run the real attack, persist and return the session."""
    clip = build_demo_clip(seed, clip_id)
    model = build_demo_model()
    _, benign_prediction = model.forward(clip)
    config = AttackConfig(epsilon=epsilon, loss=LossSpec("untargeted", benign_prediction.predicted))
    record = fgm_attack(model, clip, config)
    session = session_with_attack(AnalysisSession(clip_id=clip_id, benign_clip=clip), record)
    SessionStore(data_root).save(session)
    return session
