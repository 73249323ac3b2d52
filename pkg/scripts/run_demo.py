#!/usr/bin/env python3
"""Build the demo fixture, print the attack outcome and the spike analysis.

Equivalent to `skelespector demo` followed by `skelespector analyze`, kept as
a script so the pieces are easy to tweak interactively.
"""

import argparse
import json
from pathlib import Path

from skelespector.attack import evaluate_attack
from skelespector.cli import analysis_report
from skelespector.demo import DEMO_SEED, build_demo_session
from skelespector.store import session_attack_record


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data-root", default="data")
    parser.add_argument("--seed", type=int, default=DEMO_SEED)
    parser.add_argument("--epsilon", type=float, default=0.03)
    args = parser.parse_args()

    session = build_demo_session(Path(args.data_root), seed=args.seed, epsilon=args.epsilon)
    record = session_attack_record(session)
    evaluation = evaluate_attack(record)
    print(f"prediction: {evaluation.benign_label!r} -> {evaluation.adversarial_label!r}")
    print(f"success={evaluation.success}  linf={evaluation.linf_norm:.4g}  l2={evaluation.l2_norm:.4g}")

    report = analysis_report(session, window=8, confidence_threshold=0.05, spike_k=3.0)
    spikes = report["monitor"]["spikes"]["flagged_transitions"]
    print(f"flagged transitions: {spikes}")
    print(json.dumps(report["monitor"]["adversarial_series"]["values"], indent=None))


if __name__ == "__main__":
    main()
