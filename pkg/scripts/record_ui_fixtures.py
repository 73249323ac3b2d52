#!/usr/bin/env python3
"""Record real service responses as JSON fixtures for the frontend tests.

The frontend asserts its chart/trajectory data is a verbatim passthrough of
service payloads; these fixtures are the recorded ground truth.
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from skelespector.demo import build_demo_session
from skelespector.service import create_app

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"


def main() -> None:
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as root:
        build_demo_session(root)
        with TestClient(create_app(root)) as client:
            recordings = {
                "session.json": "/api/clips/demo",
                "monitor.json": "/api/clips/demo/monitor",
                "trajectory_left_ankle_benign.json": "/api/clips/demo/trajectory/15?variant=benign",
                "trajectory_left_ankle_adv.json": "/api/clips/demo/trajectory/15?variant=adv",
            }
            for name, path in recordings.items():
                response = client.get(path)
                response.raise_for_status()
                out = FIXTURE_DIR / name
                out.write_text(json.dumps(response.json(), indent=2, sort_keys=True) + "\n")
                print(f"wrote {out}")


if __name__ == "__main__":
    main()
