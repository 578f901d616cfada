#!/usr/bin/env python3
"""Run the ising_2d study with the shipped config; results land in out/ising_2d/."""

import sys
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from sgslab.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main([
        "ising",
        "--config", str(REPO / "configs" / "ising_2d.yaml"),
        "--out", str(REPO / "out" / "ising_2d"),
        *sys.argv[1:],
    ]))
