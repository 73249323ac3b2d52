import numpy as np
import pytest

from conftest import random_clip, toy_model
from skelespector.attack import AttackConfig, clamp_clip, evaluate_attack, fgm_attack
from skelespector.core_types import NUM_JOINTS, VideoClip
from skelespector.errors import InvalidConfig
from skelespector.models import LossSpec


def untargeted(reference=0):
    return LossSpec("untargeted", reference)


class TestClampClip:
    def test_identity_inside_range(self):
        rng = np.random.default_rng(0)
        clip = random_clip(rng, T=2)
        clamped = clamp_clip(clip, 0.0, 1.0)
        assert np.array_equal(clamped.pixel_tensor(), clip.pixel_tensor())

    def test_upper_bound(self):
        px = np.full((1, 8, 8, 1), 0.9)
        clip = VideoClip.from_pixels("c", px)
        clamped = clamp_clip(clip, 0.0, 0.5)
        assert clamped.pixel_tensor().max() == 0.5

    def test_matches_elementwise_oracle(self):
        rng = np.random.default_rng(1)
        px = rng.uniform(0.0, 1.0, size=(2, 8, 8, 1))
        clip = VideoClip.from_pixels("c", px)
        got = clamp_clip(clip, 0.2, 0.8).pixel_tensor()
        want = np.empty_like(px)
        for idx in np.ndindex(px.shape):
            want[idx] = min(max(px[idx], 0.2), 0.8)
        assert np.array_equal(got, want)

    def test_invalid_bounds(self):
        clip = VideoClip.from_pixels("c", np.zeros((1, 8, 8, 1)))
        with pytest.raises(InvalidConfig):
            clamp_clip(clip, 1.0, 0.0)


class TestAttackConfig:
    def test_negative_epsilon_rejected(self):
        with pytest.raises(InvalidConfig):
            AttackConfig(epsilon=-0.1, loss=untargeted())

    def test_zero_iterations_rejected(self):
        with pytest.raises(InvalidConfig):
            AttackConfig(epsilon=0.1, loss=untargeted(), iterations=0)


class TestFgmAttack:
    def test_epsilon_zero_is_identity(self):
        rng = np.random.default_rng(2)
        model = toy_model(rng, T=2, kind="linear")
        clip = random_clip(rng, T=2)
        record = fgm_attack(model, clip, AttackConfig(epsilon=0.0, loss=untargeted()))
        assert np.array_equal(record.adversarial_clip.pixel_tensor(), clip.pixel_tensor())
        assert record.adversarial_prediction.probabilities == record.benign_prediction.probabilities
        assert not evaluate_attack(record).success

    def test_interior_pixels_move_by_exactly_epsilon(self, margin):
        # every pixel carries gradient weight; all start at 0.5 so no clamping
        record = fgm_attack(
            margin["model"], margin["clip"], AttackConfig(epsilon=0.05, loss=untargeted(0))
        )
        diff = record.pixel_difference()
        grad = margin["model"].input_gradient(margin["clip"], untargeted(0)).values
        assert np.all(np.sign(grad) != 0)
        assert np.abs(diff - 0.05 * np.sign(grad)).max() < 1e-12
        assert record.linf_norm() == pytest.approx(0.05, abs=1e-12)

    def test_margin_fixture_flips(self, margin):
        """Closed-form check first: the eps=0.1 signed step shifts the logit
        gap by more than the benign margin, so the label must flip."""
        model, clip = margin["model"], margin["clip"]
        T, (h, w, c) = clip.frame_count, clip.frame_shape

        # effective per-pixel weight of logit k, frame t (loop oracle)
        eff = np.zeros((2, T, h, w, c))
        for k in range(2):
            for t in range(T):
                for j in range(NUM_JOINTS):
                    for a in range(2):
                        col = t * NUM_JOINTS * 2 + j * 2 + a
                        eff[k, t] += margin["classifier_weights"][k, col] * margin["detector_weights"][j, a]
        coords = np.stack([model.detector.detect_coords(f.pixels) for f in clip.frames])
        logits = model.classifier.logits_from_coords(coords)
        benign_margin = logits[0] - logits[1]
        logit_gap_shift = 0.1 * np.abs(eff[1] - eff[0]).sum()
        assert benign_margin == pytest.approx(1.0, abs=1e-9)
        assert logit_gap_shift == pytest.approx(2.56, abs=1e-9)
        assert logit_gap_shift > benign_margin

        record = fgm_attack(model, clip, AttackConfig(epsilon=0.1, loss=untargeted(0)))
        evaluation = evaluate_attack(record)
        assert record.benign_prediction.predicted == 0
        assert record.adversarial_prediction.predicted == 1
        assert evaluation.success
        assert evaluation.benign_label == "lunge"
        assert evaluation.adversarial_label == "exercising with exercise ball"

        unmoved = fgm_attack(model, clip, AttackConfig(epsilon=0.0, loss=untargeted(0)))
        assert not evaluate_attack(unmoved).success

    @pytest.mark.parametrize("seed", range(8))
    @pytest.mark.parametrize("epsilon", [0.0, 0.01, 0.03, 0.1])
    def test_budget_invariant(self, seed, epsilon):
        rng = np.random.default_rng(seed)
        kind = "linear" if seed % 2 == 0 else "softargmax"
        model = toy_model(rng, T=2, kind=kind)
        clip = random_clip(rng, T=2)
        record = fgm_attack(model, clip, AttackConfig(epsilon=epsilon, loss=untargeted(int(rng.integers(0, 4)))))
        adv = record.adversarial_clip.pixel_tensor()
        assert record.linf_norm() <= epsilon + 1e-9
        assert adv.min() >= 0.0 and adv.max() <= 1.0

    @pytest.mark.parametrize("iterations", [1, 2, 5])
    def test_iterated_containment(self, iterations):
        rng = np.random.default_rng(3)
        model = toy_model(rng, T=2, kind="softargmax")
        clip = random_clip(rng, T=2)
        config = AttackConfig(epsilon=0.06, loss=untargeted(1), iterations=iterations)
        record = fgm_attack(model, clip, config)
        assert record.linf_norm() <= 0.06 + 1e-9

    def test_deterministic(self):
        rng = np.random.default_rng(4)
        model = toy_model(rng, T=2, kind="softargmax")
        clip = random_clip(rng, T=2)
        config = AttackConfig(epsilon=0.03, loss=untargeted(2))
        a = fgm_attack(model, clip, config)
        b = fgm_attack(model, clip, config)
        assert np.array_equal(a.adversarial_clip.pixel_tensor(), b.adversarial_clip.pixel_tensor())
        assert a.adversarial_prediction.probabilities == b.adversarial_prediction.probabilities

    @pytest.mark.parametrize("seed", range(10))
    def test_untargeted_never_decreases_loss_on_linear_model(self, seed):
        # cross-entropy of a linear composition is convex in the pixels, so a
        # step aligned with the gradient sign cannot reduce it
        rng = np.random.default_rng(seed)
        model = toy_model(rng, T=2, kind="linear")
        clip = random_clip(rng, T=2)
        loss = untargeted(int(rng.integers(0, 4)))
        record = fgm_attack(model, clip, AttackConfig(epsilon=0.05, loss=loss))
        before = model.loss(record.benign_clip, loss)
        after = model.loss(record.adversarial_clip, loss)
        assert after >= before - 1e-9

    def test_targeted_mode_descends_toward_target(self):
        rng = np.random.default_rng(5)
        model = toy_model(rng, T=2, kind="linear")
        clip = random_clip(rng, T=2)
        target = 3
        loss = LossSpec("targeted", target)
        record = fgm_attack(model, clip, AttackConfig(epsilon=0.05, loss=loss))
        before = model.loss(record.benign_clip, loss)
        after = model.loss(record.adversarial_clip, loss)
        assert after <= before + 1e-9


class TestEvaluateAttack:
    def test_identical_clips_no_success(self):
        rng = np.random.default_rng(6)
        model = toy_model(rng, T=2, kind="linear")
        clip = random_clip(rng, T=2)
        record = fgm_attack(model, clip, AttackConfig(epsilon=0.0, loss=untargeted()))
        evaluation = evaluate_attack(record)
        assert not evaluation.success
        assert evaluation.linf_norm == 0.0
        assert evaluation.l2_norm == 0.0

    def test_l2_matches_loop_oracle(self):
        rng = np.random.default_rng(7)
        model = toy_model(rng, T=2, kind="softargmax")
        clip = random_clip(rng, T=2)
        record = fgm_attack(model, clip, AttackConfig(epsilon=0.04, loss=untargeted(1)))
        diff = record.pixel_difference()
        total = 0.0
        for idx in np.ndindex(diff.shape):
            total += diff[idx] ** 2
        assert record.l2_norm() == pytest.approx(total**0.5, abs=1e-9)
