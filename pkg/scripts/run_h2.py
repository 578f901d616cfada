#!/usr/bin/env python3
"""Run the h2 study with the shipped config; results land in out/h2/."""

import sys
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from sgslab.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main([
        "molecule",
        "--config", str(REPO / "configs" / "h2.yaml"),
        "--out", str(REPO / "out" / "h2"),
        *sys.argv[1:],
    ]))
