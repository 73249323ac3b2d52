#!/usr/bin/env python3
"""Epsilon sweep on seeded toy pipelines: flip rate and displacement signature.

For each epsilon, attack N seeded (model, clip) pairs and report how often the
label flips and how strongly the attacked displacement series spikes. Useful
for picking a budget that is small in pixel terms yet visible in the metrics.
"""

import argparse

import numpy as np

from skelespector.attack import AttackConfig, evaluate_attack, fgm_attack
from skelespector.core_types import VideoClip
from skelespector.metrics import detect_spikes, displacement_series
from skelespector.models import LossSpec
from skelespector.pipeline import default_toy_model


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=40)
    parser.add_argument("--frames", type=int, default=16)
    parser.add_argument("--epsilons", type=float, nargs="+", default=[0.0, 0.005, 0.01, 0.03, 0.1, 0.3])
    args = parser.parse_args()

    print(f"{'epsilon':>8}  {'flip rate':>9}  {'mean spikes':>11}  {'mean max disp':>13}")
    for epsilon in args.epsilons:
        flips = 0
        spike_counts = []
        max_disps = []
        for seed in range(args.trials):
            rng = np.random.default_rng(seed)
            model = default_toy_model((8, 8, 1), args.frames, seed=seed)
            clip = VideoClip.from_pixels("sweep", rng.uniform(0, 1, size=(args.frames, 8, 8, 1)))
            _, prediction = model.forward(clip)
            config = AttackConfig(epsilon=epsilon, loss=LossSpec("untargeted", prediction.predicted))
            record = fgm_attack(model, clip, config)
            flips += evaluate_attack(record).success
            series = displacement_series(record.adversarial_sequence)
            spike_counts.append(len(detect_spikes(series).flagged_transitions))
            defined = [v for v in series.values if v is not None]
            max_disps.append(max(defined) if defined else 0.0)
        print(
            f"{epsilon:>8.3f}  {flips / args.trials:>9.2f}  "
            f"{np.mean(spike_counts):>11.2f}  {np.mean(max_disps):>13.3f}"
        )


if __name__ == "__main__":
    main()
