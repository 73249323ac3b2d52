import math

import numpy as np
import pytest

from conftest import random_clip, toy_model
from skelespector.core_types import NUM_JOINTS, Frame, SkeletonSequence
from skelespector.errors import InvalidConfig, NonDifferentiableModel, ShapeError
from skelespector.models import (
    EndToEndModel,
    LossSpec,
    ToyLinearActionClassifier,
    ToyLinearPoseDetector,
    ToySoftargmaxPoseDetector,
    central_difference,
    end_to_end_forward,
    end_to_end_input_gradient,
    finite_difference_gradient,
    toy_classify,
    toy_detect_pose,
)
from skelespector.pipeline import DEFAULT_LABELS


# --- independent oracles ------------------------------------------------------


def oracle_softargmax(weights, tau, pixels):
    """Straight-loop softargmax decode, independent of the vectorized path."""
    J, H, W, C = weights.shape
    out = np.zeros((J, 2))
    for j in range(J):
        scores = []
        for u in range(H):
            for v in range(W):
                s = 0.0
                for c in range(C):
                    s += weights[j, u, v, c] * pixels[u, v, c]
                scores.append(s / tau)
        m = max(scores)
        exps = [math.exp(s - m) for s in scores]
        z = sum(exps)
        out[j, 0] = sum(e / z * (k % W) for k, e in enumerate(exps))
        out[j, 1] = sum(e / z * (k // W) for k, e in enumerate(exps))
    return out


def oracle_logits(weights, bias, coords):
    K, D = weights.shape
    flat = [coords[t, j, a] for t in range(coords.shape[0]) for j in range(17) for a in range(2)]
    return np.array([sum(weights[k, d] * flat[d] for d in range(D)) + bias[k] for k in range(K)])


# --- toy detectors ------------------------------------------------------------


class TestLinearDetector:
    def test_zero_weights_give_origin(self):
        det = ToyLinearPoseDetector(np.zeros((NUM_JOINTS, 2, 8, 8, 1)))
        pose = toy_detect_pose(det, Frame(np.full((8, 8, 1), 0.7)))
        assert all(j.x == 0.0 and j.y == 0.0 for j in pose.joints)
        assert all(j.confidence == 0.9 for j in pose.joints)

    def test_one_hot_weight_reads_pixel(self):
        weights = np.zeros((NUM_JOINTS, 2, 8, 8, 1))
        weights[0, 0, 3, 4, 0] = 1.0
        px = np.zeros((8, 8, 1))
        px[3, 4, 0] = 0.5
        pose = toy_detect_pose(ToyLinearPoseDetector(weights), Frame(px))
        assert pose.joints[0].x == 0.5
        assert pose.joints[0].y == 0.0

    def test_shape_mismatch(self):
        det = ToyLinearPoseDetector(np.zeros((NUM_JOINTS, 2, 8, 8, 1)))
        with pytest.raises(ShapeError):
            det.detect(Frame(np.zeros((8, 16, 1))))


class TestSoftargmaxDetector:
    @pytest.mark.parametrize("seed", range(5))
    def test_matches_loop_oracle(self, seed):
        rng = np.random.default_rng(seed)
        det = ToySoftargmaxPoseDetector.random((8, 8, 1), rng)
        px = rng.uniform(0, 1, size=(8, 8, 1))
        got = det.detect_coords(px)
        want = oracle_softargmax(det.weights, det.temperature, px)
        assert np.abs(got - want).max() < 1e-9

    @pytest.mark.parametrize("seed", range(8))
    def test_coords_inside_frame(self, seed):
        rng = np.random.default_rng(seed)
        det = ToySoftargmaxPoseDetector.random((8, 12, 1), rng)
        coords = det.detect_coords(rng.uniform(0, 1, size=(8, 12, 1)))
        assert (coords[:, 0] >= 0).all() and (coords[:, 0] <= 11).all()
        assert (coords[:, 1] >= 0).all() and (coords[:, 1] <= 7).all()

    def test_temperature_must_be_positive(self):
        with pytest.raises(InvalidConfig):
            ToySoftargmaxPoseDetector(np.zeros((NUM_JOINTS, 8, 8, 1)), temperature=0.0)


class TestToyClassifier:
    def test_zero_weights_uniform(self):
        clf = ToyLinearActionClassifier(("a", "b", "c"), np.zeros((3, 2 * 34)), np.zeros(3), 2)
        seq = SkeletonSequence.from_arrays("c", "benign", np.zeros((2, 17, 2)), 1.0)
        dist = toy_classify(clf, seq)
        assert dist.probabilities == pytest.approx((1 / 3, 1 / 3, 1 / 3), abs=1e-12)
        assert dist.predicted == 0

    def test_dominant_bias(self):
        clf = ToyLinearActionClassifier(("a", "b", "c"), np.zeros((3, 34)), np.array([10.0, 0, 0]), 1)
        seq = SkeletonSequence.from_arrays("c", "benign", np.zeros((1, 17, 2)), 1.0)
        dist = toy_classify(clf, seq)
        assert dist.predicted == 0
        assert dist.probabilities[0] > 0.99

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_loop_oracle(self, seed):
        rng = np.random.default_rng(seed)
        clf = ToyLinearActionClassifier.random(DEFAULT_LABELS, 2, rng)
        coords = rng.uniform(-3, 10, size=(2, 17, 2))
        got = clf.logits_from_coords(coords)
        want = oracle_logits(clf.weights, clf.bias, coords)
        assert np.abs(got - want).max() < 1e-9

    def test_wrong_length_rejected(self):
        rng = np.random.default_rng(0)
        clf = ToyLinearActionClassifier.random(DEFAULT_LABELS, 3, rng)
        seq = SkeletonSequence.from_arrays("c", "benign", np.zeros((2, 17, 2)), 1.0)
        with pytest.raises(ShapeError):
            clf.classify(seq)


# --- end-to-end composition ---------------------------------------------------


class TestForward:
    def test_zero_model(self):
        det = ToyLinearPoseDetector(np.zeros((NUM_JOINTS, 2, 8, 8, 1)))
        clf = ToyLinearActionClassifier(DEFAULT_LABELS, np.zeros((4, 2 * 34)), np.zeros(4), 2)
        model = EndToEndModel(det, clf)
        clip = random_clip(np.random.default_rng(1), T=2)
        seq, dist = end_to_end_forward(model, clip)
        assert np.array_equal(seq.coords(), np.zeros((2, 17, 2)))
        assert dist.probabilities == pytest.approx((0.25,) * 4, abs=1e-12)

    @pytest.mark.parametrize("kind", ["linear", "softargmax"])
    def test_sequence_length_matches_clip(self, kind):
        rng = np.random.default_rng(2)
        model = toy_model(rng, T=5, kind=kind)
        clip = random_clip(rng, T=5)
        seq, _ = model.forward(clip)
        assert seq.frame_count == clip.frame_count

    @pytest.mark.parametrize("seed", range(5))
    @pytest.mark.parametrize("kind", ["linear", "softargmax"])
    def test_equals_manual_composition(self, seed, kind):
        rng = np.random.default_rng(seed)
        model = toy_model(rng, T=3, kind=kind)
        clip = random_clip(rng, T=3)
        seq, dist = model.forward(clip)
        manual_poses = tuple(model.detector.detect(f) for f in clip.frames)
        manual_seq = SkeletonSequence(clip.clip_id, clip.variant, manual_poses)
        manual_dist = model.classifier.classify(manual_seq)
        assert np.array_equal(seq.coords(), manual_seq.coords())
        assert dist.probabilities == manual_dist.probabilities

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        model = toy_model(rng, T=2)
        clip = random_clip(rng, T=2)
        a = model.forward(clip)
        b = model.forward(clip)
        assert a[1].probabilities == b[1].probabilities
        assert np.array_equal(a[0].coords(), b[0].coords())


# --- gradients ----------------------------------------------------------------


class TestCentralDifference:
    def test_linear_function_exact_for_any_h(self):
        rng = np.random.default_rng(0)
        a = rng.normal(size=(4, 3))
        fn = lambda x: float((a * x).sum())
        x = rng.uniform(size=(4, 3))
        for h in (1e-2, 1e-5, 1e-8):
            grad = central_difference(fn, x, h)
            assert np.abs(grad - a).max() < 1e-6 * np.abs(a).max()

    def test_rejects_bad_step(self):
        with pytest.raises(InvalidConfig):
            central_difference(lambda x: 0.0, np.zeros(3), 0.0)


class TestInputGradient:
    def test_zero_classifier_means_zero_gradient(self):
        rng = np.random.default_rng(4)
        det = ToySoftargmaxPoseDetector.random((8, 8, 1), rng)
        clf = ToyLinearActionClassifier(DEFAULT_LABELS, np.zeros((4, 2 * 34)), np.zeros(4), 2)
        model = EndToEndModel(det, clf)
        clip = random_clip(rng, T=2)
        grad = end_to_end_input_gradient(model, clip, LossSpec("untargeted", 0))
        assert np.array_equal(grad.values, np.zeros((2, 8, 8, 1)))
        fd = finite_difference_gradient(model, clip, LossSpec("untargeted", 0))
        assert np.array_equal(fd.values, np.zeros((2, 8, 8, 1)))

    @pytest.mark.parametrize("seed", range(6))
    def test_linear_composition_matches_fd(self, seed):
        rng = np.random.default_rng(seed)
        model = toy_model(rng, T=2, kind="linear")
        clip = random_clip(rng, T=2)
        loss = LossSpec("untargeted", int(rng.integers(0, 4)))
        analytic = model.input_gradient(clip, loss).values
        fd = finite_difference_gradient(model, clip, loss, h=1e-5).values
        assert np.abs(analytic - fd).max() < 1e-5

    @pytest.mark.parametrize("seed", range(6))
    def test_softargmax_composition_matches_fd(self, seed):
        rng = np.random.default_rng(seed)
        model = toy_model(rng, T=2, kind="softargmax")
        clip = random_clip(rng, T=2)
        loss = LossSpec("untargeted", int(rng.integers(0, 4)))
        analytic = model.input_gradient(clip, loss).values
        fd = finite_difference_gradient(model, clip, loss, h=1e-5).values
        assert np.abs(analytic - fd).max() < 1e-4

    def test_targeted_reference_used(self):
        rng = np.random.default_rng(7)
        model = toy_model(rng, T=2, kind="linear")
        clip = random_clip(rng, T=2)
        g0 = model.input_gradient(clip, LossSpec("targeted", 0)).values
        g1 = model.input_gradient(clip, LossSpec("targeted", 1)).values
        assert not np.array_equal(g0, g1)

    def test_non_differentiable_detector_raises(self):
        class OpaqueDetector:
            def detect(self, frame):
                raise NotImplementedError

        rng = np.random.default_rng(0)
        clf = ToyLinearActionClassifier.random(DEFAULT_LABELS, 2, rng)
        model = EndToEndModel(OpaqueDetector(), clf)
        with pytest.raises(NonDifferentiableModel):
            model.input_gradient(random_clip(rng, T=2), LossSpec("untargeted", 0))

    def test_reference_label_validated(self):
        rng = np.random.default_rng(8)
        model = toy_model(rng, T=2, kind="linear")
        with pytest.raises(InvalidConfig):
            model.input_gradient(random_clip(rng, T=2), LossSpec("untargeted", 99))


class TestLossSpec:
    def test_mode_validated(self):
        with pytest.raises(InvalidConfig):
            LossSpec("sideways", 0)

    def test_negative_reference_rejected(self):
        with pytest.raises(InvalidConfig):
            LossSpec("untargeted", -1)
