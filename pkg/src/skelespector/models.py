"""Pose detectors, action classifiers, and the composed end-to-end model.

The toy detectors/classifier are analytically tractable stand-ins sized for
desk-scale testing; heavyweight pretrained models are reached through the
inference-only external adapter protocol. Gradients flow pixels -> joint
coordinates -> logits via hand-written vector-Jacobian products, so the
attack never depends on an autodiff framework.
"""

from __future__ import annotations

import subprocess
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import exchange
from .core_types import (
    NUM_JOINTS,
    Frame,
    LabelDistribution,
    Pose,
    SkeletonSequence,
    VideoClip,
    validate_sequence,
)
from .errors import (
    AdapterProtocolError,
    AdapterTimeout,
    AdapterUnavailable,
    InvalidConfig,
    NonDifferentiableModel,
    ShapeError,
)

TOY_CONFIDENCE = 0.9

LOSS_MODES = ("untargeted", "targeted")


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max()
    e = np.exp(z)
    return e / e.sum()


def _cross_entropy(logits: np.ndarray, reference: int) -> float:
    # log-sum-exp form for stability: CE = lse(z) - z[ref]
    z = logits - logits.max()
    return float(np.log(np.exp(z).sum()) - z[reference])


@dataclass(frozen=True)
class LossSpec:
    """Cross-entropy of the end-to-end output against reference_label.

    Untargeted attacks ascend this loss at the true label; targeted attacks
    descend it at the target label. The spec itself is mode-agnostic about
    the gradient: direction is the attacker's call.
    """

    mode: str = "untargeted"
    reference_label: int = 0

    def __post_init__(self) -> None:
        if self.mode not in LOSS_MODES:
            raise InvalidConfig(f"loss mode must be one of {LOSS_MODES}, got {self.mode!r}")
        if self.reference_label < 0:
            raise InvalidConfig("reference_label must be non-negative")


@dataclass(frozen=True)
class GradientClip:
    """dLoss/dPixel for every pixel of every frame; shape (T, H, W, C)."""

    clip_id: str
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if vals.ndim != 4:
            raise ShapeError(f"gradient values must be (T, H, W, C), got shape {vals.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


def _check_frame_shape(pixels: np.ndarray, expected: tuple[int, int, int]) -> None:
    if pixels.shape != expected:
        raise ShapeError(f"frame shape {pixels.shape} does not match detector weights {expected}")


@dataclass(frozen=True)
class ToyLinearPoseDetector:
    """Each coordinate is an inner product of a weight image with the pixels.

    weights has shape (17, 2, H, W, C); axis 1 indexes (x, y) readouts.
    """

    weights: np.ndarray
    confidence: float = TOY_CONFIDENCE

    def __post_init__(self) -> None:
        w = np.ascontiguousarray(np.asarray(self.weights, dtype=np.float64))
        if w.ndim != 5 or w.shape[:2] != (NUM_JOINTS, 2):
            raise ShapeError(f"linear detector weights must be ({NUM_JOINTS}, 2, H, W, C), got {w.shape}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def frame_shape(self) -> tuple[int, int, int]:
        return self.weights.shape[2:]

    def detect_coords(self, pixels: np.ndarray) -> np.ndarray:
        _check_frame_shape(pixels, self.frame_shape)
        return np.einsum("jahwc,hwc->ja", self.weights, pixels)

    def detect(self, frame: Frame) -> Pose:
        return Pose.from_arrays(self.detect_coords(frame.pixels), self.confidence)

    def coords_pixel_vjp(self, pixels: np.ndarray, cotangent: np.ndarray) -> np.ndarray:
        """Pull a (17, 2) coordinate cotangent back to pixel space."""
        _check_frame_shape(pixels, self.frame_shape)
        return np.einsum("ja,jahwc->hwc", cotangent, self.weights)

    @classmethod
    def random(cls, frame_shape: tuple[int, int, int], rng: np.random.Generator, scale: float | None = None):
        h, w, c = frame_shape
        if scale is None:
            scale = 4.0 / (h * w * c)
        return cls(rng.normal(0.0, scale, size=(NUM_JOINTS, 2, h, w, c)))


@dataclass(frozen=True)
class ToySoftargmaxPoseDetector:
    """Smooth detector: coordinates are the softargmax of a weighted heatmap.

    Per joint, a score map s[u, v] = sum_c weights[j, u, v, c] * pixels[u, v, c]
    is softmaxed at temperature tau over all positions; the coordinate is the
    probability-weighted mean of the pixel grid, hence always inside the frame.
    """

    weights: np.ndarray
    temperature: float = 0.75
    confidence: float = TOY_CONFIDENCE

    def __post_init__(self) -> None:
        w = np.ascontiguousarray(np.asarray(self.weights, dtype=np.float64))
        if w.ndim != 4 or w.shape[0] != NUM_JOINTS:
            raise ShapeError(f"softargmax weights must be ({NUM_JOINTS}, H, W, C), got {w.shape}")
        if not (self.temperature > 0):
            raise InvalidConfig("temperature must be positive")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def frame_shape(self) -> tuple[int, int, int]:
        return self.weights.shape[1:]

    def _grid(self) -> tuple[np.ndarray, np.ndarray]:
        h, w, _ = self.frame_shape
        gx = np.tile(np.arange(w, dtype=np.float64), h)
        gy = np.repeat(np.arange(h, dtype=np.float64), w)
        return gx, gy

    def _position_probs(self, pixels: np.ndarray) -> np.ndarray:
        _check_frame_shape(pixels, self.frame_shape)
        scores = np.einsum("jhwc,hwc->jhw", self.weights, pixels) / self.temperature
        flat = scores.reshape(NUM_JOINTS, -1)
        flat = flat - flat.max(axis=1, keepdims=True)
        p = np.exp(flat)
        p /= p.sum(axis=1, keepdims=True)
        return p

    def detect_coords(self, pixels: np.ndarray) -> np.ndarray:
        p = self._position_probs(pixels)
        gx, gy = self._grid()
        return np.stack([p @ gx, p @ gy], axis=1)

    def detect(self, frame: Frame) -> Pose:
        return Pose.from_arrays(self.detect_coords(frame.pixels), self.confidence)

    def coords_pixel_vjp(self, pixels: np.ndarray, cotangent: np.ndarray) -> np.ndarray:
        p = self._position_probs(pixels)
        gx, gy = self._grid()
        xs = p @ gx
        ys = p @ gy
        # d coord / d score_k = p_k * (grid_k - coord) / tau, per joint
        dscore = p * (cotangent[:, 0:1] * (gx[None, :] - xs[:, None]) + cotangent[:, 1:2] * (gy[None, :] - ys[:, None]))
        dscore /= self.temperature
        h, w, _ = self.frame_shape
        return np.einsum("jhw,jhwc->hwc", dscore.reshape(NUM_JOINTS, h, w), self.weights)

    @classmethod
    def random(
        cls,
        frame_shape: tuple[int, int, int],
        rng: np.random.Generator,
        weight_scale: float = 3.0,
        temperature: float = 0.75,
    ):
        h, w, c = frame_shape
        return cls(rng.normal(0.0, weight_scale, size=(NUM_JOINTS, h, w, c)), temperature)


@dataclass(frozen=True)
class ToyLinearActionClassifier:
    """Softmax over logits linear in the flattened (T, 17, 2) coordinates."""

    labels: tuple[str, ...]
    weights: np.ndarray
    bias: np.ndarray
    frame_count: int

    def __post_init__(self) -> None:
        labels = tuple(str(s) for s in self.labels)
        w = np.ascontiguousarray(np.asarray(self.weights, dtype=np.float64))
        b = np.ascontiguousarray(np.asarray(self.bias, dtype=np.float64))
        dim = self.frame_count * NUM_JOINTS * 2
        if w.shape != (len(labels), dim):
            raise ShapeError(f"classifier weights must be ({len(labels)}, {dim}), got {w.shape}")
        if b.shape != (len(labels),):
            raise ShapeError(f"classifier bias must be ({len(labels)},), got {b.shape}")
        w.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)

    @property
    def num_classes(self) -> int:
        return len(self.labels)

    def _check_length(self, frame_count: int) -> None:
        if frame_count != self.frame_count:
            raise ShapeError(f"classifier configured for T={self.frame_count}, got T={frame_count}")

    def logits_from_coords(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.float64)
        self._check_length(coords.shape[0])
        return self.weights @ coords.reshape(-1) + self.bias

    def classify(self, seq: SkeletonSequence) -> LabelDistribution:
        probs = _softmax(self.logits_from_coords(seq.coords()))
        # renormalize away the last float ulp so the distribution invariant holds
        probs = probs / probs.sum()
        return LabelDistribution(self.labels, tuple(probs.tolist()))

    def _check_reference(self, reference: int) -> None:
        if not (0 <= reference < self.num_classes):
            raise InvalidConfig(f"reference label {reference} outside [0, {self.num_classes})")

    def loss_from_coords(self, coords: np.ndarray, reference: int) -> float:
        self._check_reference(reference)
        return _cross_entropy(self.logits_from_coords(coords), reference)

    def coords_gradient(self, coords: np.ndarray, reference: int) -> np.ndarray:
        """d cross-entropy / d coords, shape (T, 17, 2)."""
        self._check_reference(reference)
        p = _softmax(self.logits_from_coords(coords))
        p[reference] -= 1.0
        return (p @ self.weights).reshape(self.frame_count, NUM_JOINTS, 2)

    @classmethod
    def random(
        cls,
        labels: tuple[str, ...],
        frame_count: int,
        rng: np.random.Generator,
        weight_scale: float = 0.05,
        bias_scale: float = 0.5,
    ):
        dim = frame_count * NUM_JOINTS * 2
        return cls(
            tuple(labels),
            rng.normal(0.0, weight_scale, size=(len(labels), dim)),
            rng.normal(0.0, bias_scale, size=len(labels)),
            frame_count,
        )


@dataclass(frozen=True)
class EndToEndModel:
    """Pose detector composed framewise with an action classifier.

    forward(clip) is exactly classifier(detector applied per frame); gradient
    calls chain the classifier's coordinate gradient through the detector's
    pixel VJP.
    """

    detector: object
    classifier: object

    @property
    def labels(self) -> tuple[str, ...]:
        return self.classifier.labels

    def forward(self, clip: VideoClip) -> tuple[SkeletonSequence, LabelDistribution]:
        detect_sequence = getattr(self.detector, "detect_sequence", None)
        if detect_sequence is not None:
            seq = detect_sequence(clip)
        else:
            poses = tuple(self.detector.detect(f) for f in clip.frames)
            seq = SkeletonSequence(clip.clip_id, clip.variant, poses)
        return seq, self.classifier.classify(seq)

    def _require_differentiable(self) -> None:
        if not (hasattr(self.detector, "coords_pixel_vjp") and hasattr(self.detector, "detect_coords")):
            raise NonDifferentiableModel(f"{type(self.detector).__name__} exposes no pixel gradients")
        if not hasattr(self.classifier, "coords_gradient"):
            raise NonDifferentiableModel(f"{type(self.classifier).__name__} exposes no coordinate gradients")

    def loss_on_pixels(self, pixels: np.ndarray, loss: LossSpec) -> float:
        """Scalar cross-entropy on a raw (T, H, W, C) tensor.

        Skips Frame's [0, 1] validation so finite-difference probes may step
        slightly outside the image range.
        """
        if not hasattr(self.detector, "detect_coords"):
            raise NonDifferentiableModel(f"{type(self.detector).__name__} has no tensor coordinate path")
        coords = np.stack([self.detector.detect_coords(fr) for fr in pixels])
        return self.classifier.loss_from_coords(coords, loss.reference_label)

    def loss(self, clip: VideoClip, loss: LossSpec) -> float:
        return self.loss_on_pixels(clip.pixel_tensor(), loss)

    def input_gradient(self, clip: VideoClip, loss: LossSpec) -> GradientClip:
        """d loss / d pixel for every pixel of the clip, via the chain rule."""
        self._require_differentiable()
        coords = np.stack([self.detector.detect_coords(f.pixels) for f in clip.frames])
        dcoords = self.classifier.coords_gradient(coords, loss.reference_label)
        grads = np.stack(
            [self.detector.coords_pixel_vjp(f.pixels, dcoords[t]) for t, f in enumerate(clip.frames)]
        )
        return GradientClip(clip.clip_id, grads)


def toy_detect_pose(detector, frame: Frame) -> Pose:
    """Run one toy detector on one frame."""
    return detector.detect(frame)


def toy_classify(classifier: ToyLinearActionClassifier, seq: SkeletonSequence) -> LabelDistribution:
    """Run the toy classifier on a detected sequence."""
    return classifier.classify(seq)


def end_to_end_forward(model: EndToEndModel, clip: VideoClip) -> tuple[SkeletonSequence, LabelDistribution]:
    return model.forward(clip)


def end_to_end_input_gradient(model: EndToEndModel, clip: VideoClip, loss: LossSpec) -> GradientClip:
    return model.input_gradient(clip, loss)


def central_difference(fn, x: np.ndarray, h: float) -> np.ndarray:
    """Central-difference gradient estimate of a scalar function of an array."""
    if not (h > 0):
        raise InvalidConfig("finite-difference step must be positive")
    x = np.array(x, dtype=np.float64)
    grad = np.zeros_like(x)
    flat_x = x.ravel()
    flat_g = grad.ravel()
    for i in range(flat_x.size):
        orig = flat_x[i]
        flat_x[i] = orig + h
        hi = fn(x)
        flat_x[i] = orig - h
        lo = fn(x)
        flat_x[i] = orig
        flat_g[i] = (hi - lo) / (2.0 * h)
    return grad


def finite_difference_gradient(model: EndToEndModel, clip: VideoClip, loss: LossSpec, h: float = 1e-5) -> GradientClip:
    """Numeric oracle for input_gradient; O(#pixels) forwards, tiny clips only."""
    grad = central_difference(lambda px: model.loss_on_pixels(px, loss), clip.pixel_tensor(), h)
    return GradientClip(clip.clip_id, grad)


@dataclass(frozen=True)
class ExternalAdapterConfig:
    """How to invoke an out-of-process pose detector.

    The command is run as ``command... input_path output_path`` with the
    exchange documents from the `exchange` module.
    """

    command: tuple[str, ...]
    timeout_s: float = 300.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "command", tuple(str(c) for c in self.command))
        if not self.command:
            raise InvalidConfig("adapter command must not be empty")
        if not (self.timeout_s > 0):
            raise InvalidConfig("adapter timeout must be positive")


class ExternalPoseAdapter:
    """Inference-only bridge to an external pose model.

    Gradients are never requested across the process boundary; composing this
    detector into an EndToEndModel supports forward() but not input_gradient.
    Access is serialized per adapter instance: one in-flight process at a time.
    """

    def __init__(self, config: ExternalAdapterConfig):
        self.config = config
        self._lock = threading.Lock()

    def detect_sequence(self, clip: VideoClip) -> SkeletonSequence:
        with self._lock:
            with tempfile.TemporaryDirectory(prefix="skelespector-adapter-") as tmp:
                in_path = Path(tmp) / "input.json"
                out_path = Path(tmp) / "output.json"
                exchange.write_adapter_input(clip, in_path)
                try:
                    proc = subprocess.run(
                        [*self.config.command, str(in_path), str(out_path)],
                        capture_output=True,
                        timeout=self.config.timeout_s,
                    )
                except subprocess.TimeoutExpired as exc:
                    raise AdapterTimeout(f"adapter exceeded {self.config.timeout_s} s") from exc
                except OSError as exc:
                    raise AdapterUnavailable(f"could not spawn adapter: {exc}") from exc
                if proc.returncode != 0:
                    stderr = proc.stderr.decode("utf-8", "replace").strip()
                    raise AdapterUnavailable(f"adapter exited with {proc.returncode}: {stderr}")
                if not out_path.exists():
                    raise AdapterUnavailable("adapter wrote no output file")
                seq = exchange.read_adapter_output(out_path, clip.clip_id, clip.frame_count)
        h, w, _ = clip.frame_shape
        report = validate_sequence(seq, h, w)
        if not report.ok:
            first = report.issues[0]
            raise AdapterProtocolError(f"adapter output failed validation: {first.kind} at frame {first.frame}")
        return seq

    def detect(self, frame: Frame) -> Pose:
        one = VideoClip("single-frame", (frame,))
        return self.detect_sequence(one).poses[0]


def external_detect_sequence(config: ExternalAdapterConfig, clip: VideoClip) -> SkeletonSequence:
    """One-shot convenience wrapper around ExternalPoseAdapter."""
    return ExternalPoseAdapter(config).detect_sequence(clip)
