"""Shared fixtures: random inputs, toy models, the analytic margin fixture,
and a session-scoped demo data root."""

from __future__ import annotations

import numpy as np
import pytest

from skelespector.attack import AttackConfig, fgm_attack
from skelespector.core_types import NUM_JOINTS, SkeletonSequence, VideoClip
from skelespector.demo import build_demo_session
from skelespector.models import (
    EndToEndModel,
    LossSpec,
    ToyLinearActionClassifier,
    ToyLinearPoseDetector,
    ToySoftargmaxPoseDetector,
)
from skelespector.pipeline import DEFAULT_LABELS
from skelespector.store import AnalysisSession, session_with_attack

TWO_LABELS = ("lunge", "exercising with exercise ball")


def random_clip(rng: np.random.Generator, T: int = 3, h: int = 8, w: int = 8, c: int = 1) -> VideoClip:
    return VideoClip.from_pixels("clip", rng.uniform(0.0, 1.0, size=(T, h, w, c)))


def random_sequence(
    rng: np.random.Generator,
    T: int = 32,
    coord_scale: float = 24.0,
    confidences: float | None = None,
    clip_id: str = "clip",
    variant: str = "benign",
) -> SkeletonSequence:
    coords = rng.uniform(-2.0, coord_scale, size=(T, NUM_JOINTS, 2))
    conf = rng.uniform(0.0, 1.0, size=(T, NUM_JOINTS)) if confidences is None else confidences
    return SkeletonSequence.from_arrays(clip_id, variant, coords, conf)


def toy_model(rng: np.random.Generator, T: int = 2, shape=(8, 8, 1), kind: str = "softargmax") -> EndToEndModel:
    if kind == "linear":
        detector = ToyLinearPoseDetector.random(shape, rng)
    else:
        detector = ToySoftargmaxPoseDetector.random(shape, rng)
    classifier = ToyLinearActionClassifier.random(DEFAULT_LABELS, T, rng)
    return EndToEndModel(detector, classifier)


def margin_fixture() -> dict:
    """Two-class linear composition with an analytically known decision margin.

    Every pixel feeds joint 0's x readout with weight 0.1; the classifier puts
    +1/-1 on that coordinate in both frames. With all pixels at 0.5 the benign
    margin (logit0 - logit1) is 1.0, while one signed step at epsilon = 0.1
    shifts the logit gap by 2.56, so the attack must flip the label.
    """
    T, h, w, c = 2, 8, 8, 1
    det_weights = np.zeros((NUM_JOINTS, 2, h, w, c))
    det_weights[0, 0] = 0.1
    detector = ToyLinearPoseDetector(det_weights)
    dim = T * NUM_JOINTS * 2
    clf_weights = np.zeros((2, dim))
    for t in range(T):
        col = t * NUM_JOINTS * 2  # flattened (t, joint 0, x)
        clf_weights[0, col] = 1.0
        clf_weights[1, col] = -1.0
    classifier = ToyLinearActionClassifier(TWO_LABELS, clf_weights, np.array([-11.8, 0.0]), T)
    clip = VideoClip.from_pixels("margin", np.full((T, h, w, c), 0.5))
    return {
        "model": EndToEndModel(detector, classifier),
        "clip": clip,
        "true_label": 0,
        "detector_weights": det_weights,
        "classifier_weights": clf_weights,
        "bias": np.array([-11.8, 0.0]),
    }


def attack_demo_clip(root, clip_id: str = "demo"):
    return build_demo_session(root, clip_id)


def make_session(seed: int, T: int = 4, size: int = 8, with_attack: bool = True) -> AnalysisSession:
    """Random but fully populated session for persistence tests."""
    rng = np.random.default_rng(seed)
    clip_id = f"clip-{seed}"
    benign = VideoClip.from_pixels(clip_id, rng.uniform(0.0, 1.0, size=(T, size, size, 1)), "benign", fps=12.0)
    session = AnalysisSession(clip_id=clip_id, benign_clip=benign)
    if not with_attack:
        return session
    epsilon = 0.05
    adv_pixels = np.clip(benign.pixel_tensor() + rng.uniform(-epsilon, epsilon, size=(T, size, size, 1)), 0, 1)
    adv = VideoClip.from_pixels(clip_id, adv_pixels, "adversarial", fps=12.0)

    def seq(variant):
        coords = rng.uniform(-5.0, size + 5.0, size=(T, NUM_JOINTS, 2))
        conf = rng.uniform(0.0, 1.0, size=(T, NUM_JOINTS))
        return SkeletonSequence.from_arrays(clip_id, variant, coords, conf)

    def pred():
        from skelespector.core_types import LabelDistribution

        probs = rng.dirichlet(np.ones(len(DEFAULT_LABELS)))
        probs = probs / probs.sum()
        return LabelDistribution(DEFAULT_LABELS, tuple(probs.tolist()))

    record_like = type(
        "RecordFields",
        (),
        {
            "adversarial_clip": adv,
            "benign_sequence": seq("benign"),
            "adversarial_sequence": seq("adversarial"),
            "benign_prediction": pred(),
            "adversarial_prediction": pred(),
            "config": AttackConfig(epsilon=epsilon, loss=LossSpec("untargeted", 0)),
        },
    )
    return session_with_attack(session, record_like)


@pytest.fixture(scope="session")
def demo_root(tmp_path_factory):
    """Data root holding the packaged demo session, built once."""
    root = tmp_path_factory.mktemp("demo-data")
    build_demo_session(root)
    return root


@pytest.fixture
def margin():
    return margin_fixture()
