"""Command-line entry point: ingest, attack, analyze, export, serve, demo.

Exit codes: 0 success, 1 domain error, 2 usage error. Diagnostics go to
stderr; data (reports, CSV, summaries) goes to stdout or the --out file.
The data root comes from --data-root, the SKELESPECTOR_DATA environment
variable, or ./data, in that order.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from . import demo as demo_mod
from . import wire
from .attack import evaluate_attack
from .errors import SkelespectorError
from .metrics import (
    DEFAULT_CONFIDENCE_THRESHOLD,
    DEFAULT_SEGMENT_WINDOW,
    DEFAULT_SPIKE_K,
)
from .pipeline import DEFAULT_MODEL_SEED, run_attack_on_session
from .store import SessionStore, session_attack_record
from .viewmodel import monitor_payload

DEFAULT_DATA_ROOT = "data"

ENV_DATA_ROOT = "SKELESPECTOR_DATA"


def _nonnegative_float(text: str) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _add_data_root(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--data-root",
        default=None,
        help=f"session storage directory (default: ${ENV_DATA_ROOT} or ./{DEFAULT_DATA_ROOT})",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skelespector", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load a frame directory into a new session")
    p.add_argument("--frames-dir", required=True)
    p.add_argument("--clip-id", required=True)
    p.add_argument("--fps", type=float, default=8.0)
    _add_data_root(p)

    p = sub.add_parser("attack", help="run the signed-gradient attack on a clip")
    p.add_argument("--clip", required=True)
    p.add_argument("--epsilon", type=_nonnegative_float, default=0.03)
    p.add_argument("--mode", choices=["untargeted", "targeted"], default="untargeted")
    p.add_argument("--target-label", type=int, default=None)
    p.add_argument("--iterations", type=_positive_int, default=1)
    p.add_argument("--seed", type=int, default=DEFAULT_MODEL_SEED)
    _add_data_root(p)

    p = sub.add_parser("analyze", help="write the displacement/spike report for a clip")
    p.add_argument("--clip", required=True)
    p.add_argument("--out", default=None, help="report path (default: stdout)")
    p.add_argument("--window", type=_positive_int, default=DEFAULT_SEGMENT_WINDOW)
    p.add_argument("--confidence-threshold", type=float, default=DEFAULT_CONFIDENCE_THRESHOLD)
    p.add_argument("--spike-k", type=float, default=DEFAULT_SPIKE_K)
    _add_data_root(p)

    p = sub.add_parser("export", help="export displacement series as CSV")
    p.add_argument("--clip", required=True)
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p.add_argument("--confidence-threshold", type=float, default=DEFAULT_CONFIDENCE_THRESHOLD)
    _add_data_root(p)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8008)
    p.add_argument("--seed", type=int, default=DEFAULT_MODEL_SEED)
    p.add_argument("--ui-dir", default=None, help="static frontend directory to mount at /")
    _add_data_root(p)

    p = sub.add_parser("demo", help="build the packaged attack fixture end to end")
    p.add_argument("--clip-id", default=demo_mod.DEMO_CLIP_ID)
    p.add_argument("--seed", type=int, default=demo_mod.DEMO_SEED)
    p.add_argument("--epsilon", type=_nonnegative_float, default=demo_mod.DEMO_EPSILON)
    _add_data_root(p)

    return parser


def _data_root(args: argparse.Namespace) -> Path:
    root = args.data_root or os.environ.get(ENV_DATA_ROOT) or DEFAULT_DATA_ROOT
    return Path(root)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_ingest(args) -> int:
    store = SessionStore(_data_root(args))
    session = store.ingest(args.frames_dir, args.clip_id, args.fps)
    print(f"ingested {session.frame_count} frames as clip {session.clip_id!r}", file=sys.stderr)
    print(str(store.session_path(session.clip_id)))
    return 0


def cmd_attack(args) -> int:
    store = SessionStore(_data_root(args))
    session = store.load(args.clip)
    updated, record = run_attack_on_session(
        session,
        epsilon=args.epsilon,
        mode=args.mode,
        target_label=args.target_label,
        iterations=args.iterations,
        seed=args.seed,
    )
    store.save(updated)
    summary = wire.evaluation_jsonable(evaluate_attack(record))
    summary["clip_id"] = args.clip
    print(json.dumps(summary, sort_keys=True, indent=2))
    return 0


def analysis_report(session, window: int, confidence_threshold: float, spike_k: float) -> dict:
    """Report mirroring the monitor payload plus the attack evaluation.

    Deliberately timestamp-free so identical sessions yield identical bytes.
    """
    payload = monitor_payload(session, confidence_threshold, window, spike_k)
    record = session_attack_record(session)
    report = {
        "clip_id": session.clip_id,
        "parameters": {
            "confidence_threshold": confidence_threshold,
            "window": window,
            "spike_k": spike_k,
        },
        "monitor": wire.monitor_jsonable(payload),
        "evaluation": wire.evaluation_jsonable(evaluate_attack(record)) if record else None,
    }
    return report


def cmd_analyze(args) -> int:
    store = SessionStore(_data_root(args))
    session = store.load(args.clip)
    report = analysis_report(session, args.window, args.confidence_threshold, args.spike_k)
    _emit(json.dumps(report, sort_keys=True, indent=2) + "\n", args.out)
    return 0


def cmd_export(args) -> int:
    from .metrics import displacement_series

    store = SessionStore(_data_root(args))
    session = store.load(args.clip)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["transition", "benign_displacement", "adversarial_displacement"])
    benign = (
        displacement_series(session.benign_sequence, args.confidence_threshold).values
        if session.benign_sequence
        else ()
    )
    adv = (
        displacement_series(session.adversarial_sequence, args.confidence_threshold).values
        if session.adversarial_sequence
        else ()
    )
    for t in range(max(len(benign), len(adv))):
        b = benign[t] if t < len(benign) else None
        a = adv[t] if t < len(adv) else None
        writer.writerow([t, "" if b is None else repr(b), "" if a is None else repr(a)])
    _emit(buf.getvalue(), args.out)
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    try:
        serve(args.host, args.port, _data_root(args), args.seed, args.ui_dir)
    except OSError as exc:
        print(f"error: cannot serve on {args.host}:{args.port}: {exc}", file=sys.stderr)
        return 1
    return 0


def cmd_demo(args) -> int:
    root = _data_root(args)
    session = demo_mod.build_demo_session(root, args.clip_id, args.seed, args.epsilon)
    record = session_attack_record(session)
    evaluation = evaluate_attack(record)
    print(
        f"demo clip {session.clip_id!r} written under {root}: "
        f"{evaluation.benign_label!r} -> {evaluation.adversarial_label!r} "
        f"(attack {'succeeded' if evaluation.success else 'failed'}, "
        f"L-inf {evaluation.linf_norm:.4g})",
        file=sys.stderr,
    )
    print(session.clip_id)
    return 0


_HANDLERS = {
    "ingest": cmd_ingest,
    "attack": cmd_attack,
    "analyze": cmd_analyze,
    "export": cmd_export,
    "serve": cmd_serve,
    "demo": cmd_demo,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.command](args)
    except SkelespectorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FileNotFoundError, NotADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
