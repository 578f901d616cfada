#!/usr/bin/env python3
"""Run the he2 study with the shipped config; results land in out/he2/."""

import sys
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from sgslab.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main([
        "molecule",
        "--config", str(REPO / "configs" / "he2.yaml"),
        "--out", str(REPO / "out" / "he2"),
        *sys.argv[1:],
    ]))
