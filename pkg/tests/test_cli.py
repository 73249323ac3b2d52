import json

import numpy as np
import pytest
from PIL import Image

from skelespector.cli import analysis_report, main
from skelespector.store import SessionStore, load_session


def write_frames(directory, count=3, value=100):
    directory.mkdir(parents=True, exist_ok=True)
    for i in range(count):
        Image.fromarray(np.full((8, 8), value, dtype=np.uint8), "L").save(
            directory / f"frame_{i:05d}.png"
        )


class TestIngest:
    def test_ingest_creates_session(self, tmp_path, capsys):
        frames = tmp_path / "frames"
        write_frames(frames)
        root = tmp_path / "root"
        code = main(["ingest", "--frames-dir", str(frames), "--clip-id", "demo", "--data-root", str(root)])
        assert code == 0
        assert (root / "demo" / "session.json").is_file()
        out = capsys.readouterr().out.strip()
        assert out.endswith("session.json")

    def test_bad_directory_is_domain_error(self, tmp_path, capsys):
        code = main(["ingest", "--frames-dir", str(tmp_path), "--clip-id", "x", "--data-root", str(tmp_path / "r")])
        assert code == 1
        assert "error:" in capsys.readouterr().err


class TestUsageErrors:
    def test_negative_epsilon_is_usage_error(self, tmp_path, capsys):
        code = main(["attack", "--clip", "demo", "--epsilon", "-1", "--data-root", str(tmp_path)])
        assert code == 2
        assert "usage" in capsys.readouterr().err

    def test_unknown_subcommand(self, capsys):
        assert main(["frobnicate"]) == 2

    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0


class TestAttackAndAnalyze:
    def test_attack_then_analyze(self, tmp_path, capsys):
        frames = tmp_path / "frames"
        write_frames(frames, count=4)
        root = tmp_path / "root"
        assert main(["ingest", "--frames-dir", str(frames), "--clip-id", "c1", "--data-root", str(root)]) == 0
        capsys.readouterr()
        assert main(["attack", "--clip", "c1", "--epsilon", "0.05", "--data-root", str(root)]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["clip_id"] == "c1"
        assert summary["linf_norm"] <= 0.05 + 1e-9
        assert {"success", "l2_norm", "benign_label", "adversarial_label"} <= set(summary)
        report_path = tmp_path / "report.json"
        assert (
            main(["analyze", "--clip", "c1", "--out", str(report_path), "--data-root", str(root)]) == 0
        )
        report = json.loads(report_path.read_text())
        assert report["clip_id"] == "c1"
        assert report["evaluation"] is not None
        assert len(report["monitor"]["benign_series"]["values"]) == 3

    def test_analyze_matches_library_call(self, tmp_path, demo_root, capsys):
        code = main(["analyze", "--clip", "demo", "--data-root", str(demo_root)])
        assert code == 0
        got = json.loads(capsys.readouterr().out)
        session = load_session(demo_root / "demo")
        want = analysis_report(session, 8, 0.05, 3.0)
        assert got == want

    def test_unknown_clip_is_domain_error(self, tmp_path, capsys):
        assert main(["analyze", "--clip", "ghost", "--data-root", str(tmp_path)]) == 1
        assert "error:" in capsys.readouterr().err


class TestDemoReproducibility:
    def test_demo_then_analyze_byte_stable(self, tmp_path):
        reports = []
        for run in ("a", "b"):
            root = tmp_path / run
            assert main(["demo", "--data-root", str(root), "--seed", "7"]) == 0
            out = tmp_path / f"report-{run}.json"
            assert main(["analyze", "--clip", "demo", "--out", str(out), "--data-root", str(root)]) == 0
            reports.append(out.read_bytes())
        assert reports[0] == reports[1]

    def test_demo_prints_clip_id(self, tmp_path, capsys):
        assert main(["demo", "--data-root", str(tmp_path / "r")]) == 0
        captured = capsys.readouterr()
        assert captured.out.strip() == "demo"
        assert "lunge" in captured.err


class TestExport:
    def test_csv_columns(self, tmp_path, demo_root, capsys):
        assert main(["export", "--clip", "demo", "--data-root", str(demo_root)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "transition,benign_displacement,adversarial_displacement"
        assert len(lines) == 1 + 31
        session = load_session(demo_root / "demo")
        from skelespector.metrics import displacement_series

        benign = displacement_series(session.benign_sequence).values
        first = lines[1].split(",")
        assert first[0] == "0"
        assert float(first[1]) == benign[0]

    def test_gaps_become_empty_cells(self, tmp_path, capsys):
        from conftest import make_session

        session = make_session(70)
        # zero out confidences so every transition gaps out
        from skelespector.core_types import SkeletonSequence
        from dataclasses import replace

        dead = SkeletonSequence.from_arrays(
            session.clip_id, "benign", session.benign_sequence.coords(), 0.0
        )
        session = replace(session, benign_sequence=dead)
        store = SessionStore(tmp_path)
        store.save(session)
        assert main(["export", "--clip", session.clip_id, "--data-root", str(tmp_path)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[1].split(",")[1] == ""
