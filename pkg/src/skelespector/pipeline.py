"""Glue between stored sessions and the attack: default toy models, job body.

Real pretrained detectors are reached only through the external adapter and
are never attacked; the service and CLI run attacks against seeded toy
models sized to whatever clip was ingested.
"""

from __future__ import annotations

import numpy as np

from .attack import AttackConfig, AttackRecord, fgm_attack
from .core_types import VideoClip
from .errors import InvalidConfig
from .models import (
    EndToEndModel,
    LossSpec,
    ToyLinearActionClassifier,
    ToySoftargmaxPoseDetector,
)
from .store import AnalysisSession, session_with_attack

DEFAULT_LABELS = ("lunge", "exercising with exercise ball", "clean and jerk", "jumping jack")

DEFAULT_MODEL_SEED = 11


def default_toy_model(
    frame_shape: tuple[int, int, int],
    frame_count: int,
    labels: tuple[str, ...] = DEFAULT_LABELS,
    seed: int = DEFAULT_MODEL_SEED,
) -> EndToEndModel:
    """Deterministic toy pipeline for a given clip geometry and seed."""
    rng = np.random.default_rng(seed)
    detector = ToySoftargmaxPoseDetector.random(frame_shape, rng)
    classifier = ToyLinearActionClassifier.random(labels, frame_count, rng)
    return EndToEndModel(detector, classifier)


def model_for_clip(clip: VideoClip, seed: int = DEFAULT_MODEL_SEED) -> EndToEndModel:
    return default_toy_model(clip.frame_shape, clip.frame_count, seed=seed)


def resolve_loss(
    model: EndToEndModel, clip: VideoClip, mode: str = "untargeted", target_label: int | None = None
) -> LossSpec:
    """Pick the loss reference: benign prediction (untargeted) or the target."""
    if mode == "targeted":
        if target_label is None:
            raise InvalidConfig("targeted mode needs a target label")
        if not (0 <= target_label < len(model.labels)):
            raise InvalidConfig(f"target label {target_label} outside [0, {len(model.labels)})")
        return LossSpec("targeted", target_label)
    _, prediction = model.forward(clip)
    return LossSpec("untargeted", prediction.predicted)


def run_attack_on_session(
    session: AnalysisSession,
    epsilon: float,
    mode: str = "untargeted",
    target_label: int | None = None,
    iterations: int = 1,
    seed: int = DEFAULT_MODEL_SEED,
    model: EndToEndModel | None = None,
) -> tuple[AnalysisSession, AttackRecord]:
    """Attack a session's benign clip and fold the results back in."""
    if epsilon < 0:
        raise InvalidConfig(f"epsilon must be >= 0, got {epsilon!r}")
    if iterations < 1:
        raise InvalidConfig(f"iterations must be >= 1, got {iterations!r}")
    clip = session.benign_clip
    if model is None:
        model = model_for_clip(clip, seed)
    loss = resolve_loss(model, clip, mode, target_label)
    config = AttackConfig(epsilon=epsilon, loss=loss, iterations=iterations)
    record = fgm_attack(model, clip, config)
    return session_with_attack(session, record), record
