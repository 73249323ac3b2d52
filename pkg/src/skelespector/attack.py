"""Fast Gradient Method against the end-to-end model, plus outcome scoring.

The single-step attack moves every pixel by epsilon times the sign of the
loss gradient (sign(0) = 0), then clamps back into [0, 1] so attacked clips
stay renderable images. Untargeted mode ascends the true-label cross-entropy;
targeted mode descends the target-label cross-entropy. iterations > 1 splits
the budget into epsilon/iterations steps with a fresh gradient each step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core_types import LabelDistribution, SkeletonSequence, VideoClip
from .errors import InvalidConfig, ShapeError
from .models import EndToEndModel, LossSpec

DEFAULT_EPSILON = 0.03

BUDGET_SLACK = 1e-9


@dataclass(frozen=True)
class AttackConfig:
    """L-infinity budget, loss definition and step count for one attack."""

    epsilon: float
    loss: LossSpec
    iterations: int = 1
    clamp_lo: float = 0.0
    clamp_hi: float = 1.0

    def __post_init__(self) -> None:
        if not (self.epsilon >= 0):
            raise InvalidConfig(f"epsilon must be >= 0, got {self.epsilon!r}")
        if self.iterations < 1:
            raise InvalidConfig(f"iterations must be >= 1, got {self.iterations!r}")
        if not (self.clamp_lo < self.clamp_hi):
            raise InvalidConfig("clamp_lo must be below clamp_hi")


@dataclass(frozen=True)
class AttackRecord:
    """Paired benign/adversarial clips with detections and predictions."""

    benign_clip: VideoClip
    adversarial_clip: VideoClip
    config: AttackConfig
    benign_prediction: LabelDistribution
    adversarial_prediction: LabelDistribution
    benign_sequence: SkeletonSequence
    adversarial_sequence: SkeletonSequence

    def __post_init__(self) -> None:
        if self.benign_clip.frame_shape != self.adversarial_clip.frame_shape or (
            self.benign_clip.frame_count != self.adversarial_clip.frame_count
        ):
            raise ShapeError("benign and adversarial clips must be shape-identical")
        linf = self.linf_norm()
        if linf > self.config.epsilon + BUDGET_SLACK:
            raise ValueError(f"perturbation {linf!r} exceeds epsilon {self.config.epsilon!r}")

    def pixel_difference(self) -> np.ndarray:
        return self.adversarial_clip.pixel_tensor() - self.benign_clip.pixel_tensor()

    def linf_norm(self) -> float:
        diff = self.pixel_difference()
        return float(np.abs(diff).max()) if diff.size else 0.0

    def l2_norm(self) -> float:
        return float(np.sqrt(np.square(self.pixel_difference()).sum()))


@dataclass(frozen=True)
class AttackEvaluation:
    """Did the label flip (or hit the target), and how big was the step."""

    success: bool
    linf_norm: float
    l2_norm: float
    benign_label: str
    adversarial_label: str


def clamp_clip(clip: VideoClip, lo: float, hi: float) -> VideoClip:
    """Elementwise clamp of every pixel into [lo, hi]."""
    if not (lo < hi):
        raise InvalidConfig("clamp lower bound must be below upper bound")
    return VideoClip.from_pixels(clip.clip_id, np.clip(clip.pixel_tensor(), lo, hi), clip.variant, clip.fps)


def fgm_attack(model: EndToEndModel, clip: VideoClip, config: AttackConfig) -> AttackRecord:
    """Craft an adversarial clip and re-run the end-to-end model on it.

    The gradient is computed once over the whole clip (all frames jointly);
    each step is clamp(x + direction * (epsilon/iterations) * sign(grad)).
    Deterministic: identical (model, clip, config) yields a bit-identical
    record.
    """
    benign_sequence, benign_prediction = model.forward(clip)
    direction = 1.0 if config.loss.mode == "untargeted" else -1.0
    step = config.epsilon / config.iterations
    pixels = clip.pixel_tensor()
    current = clip
    for _ in range(config.iterations):
        grad = model.input_gradient(current, config.loss)
        pixels = np.clip(pixels + direction * step * np.sign(grad.values), config.clamp_lo, config.clamp_hi)
        current = VideoClip.from_pixels(clip.clip_id, pixels, "adversarial", clip.fps)
    adversarial_sequence, adversarial_prediction = model.forward(current)
    return AttackRecord(
        benign_clip=clip,
        adversarial_clip=current,
        config=config,
        benign_prediction=benign_prediction,
        adversarial_prediction=adversarial_prediction,
        benign_sequence=benign_sequence,
        adversarial_sequence=adversarial_sequence,
    )


def evaluate_attack(record: AttackRecord) -> AttackEvaluation:
    """Success = label changed (untargeted) or target reached (targeted)."""
    benign = record.benign_prediction
    adversarial = record.adversarial_prediction
    if record.config.loss.mode == "targeted":
        success = adversarial.predicted == record.config.loss.reference_label
    else:
        success = adversarial.predicted != benign.predicted
    return AttackEvaluation(
        success=success,
        linf_norm=record.linf_norm(),
        l2_norm=record.l2_norm(),
        benign_label=benign.predicted_label,
        adversarial_label=adversarial.predicted_label,
    )
