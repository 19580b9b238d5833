#!/usr/bin/env python3
"""Write the data behind the soliton gallery and flow figures (CSV/JSON/OBJ, no plotting)."""

import argparse
import sys
from pathlib import Path

from conesolitons.cli import main as cli

# (subdir, argv) pairs; parameters are the gallery ones.
RUNS = [
    ("cigar", ["classify", "--eps", "0", "--a", "1", "--b", "-1"]),
    ("alpha_beta_cone", ["classify", "--eps", "1", "--a", "1", "--b", "-0.85"]),
    ("football", ["football", "--a1", "108", "--a2", "183.38"]),
    ("football", ["embed", "--eps", "-1", "--a", "1", "--b", "0.3", "--A", "4.56"]),
    ("teardrop", ["classify", "--eps", "-1", "--a", "0.8", "--b", "-1"]),
    ("teardrop", ["embed", "--preset", "teardrop"]),
    ("portrait_shrinking", ["portrait", "--eps", "-1", "--a", "1"]),
    ("portrait_expanding", ["portrait", "--eps", "1", "--a", "1"]),
    ("flow_sphere", ["flow", "--preset", "sphere", "--T", "0.4", "--snapshot-every", "2000"]),
    ("flow_football", ["flow", "--preset", "football", "--T", "0.1", "--snapshot-every", "1000"]),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="figures", help="root output directory")
    args = ap.parse_args()
    worst = 0
    for sub, argv in RUNS:
        print(f"[{sub}] {' '.join(argv)}")
        worst = max(worst, cli(["--out", str(Path(args.out) / sub), *argv]))
    return worst


if __name__ == "__main__":
    sys.exit(main())
