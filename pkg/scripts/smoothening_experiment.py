#!/usr/bin/env python3
"""Truncated-cone sweep over several cone exponents: barrier fit and ordering per beta."""

import argparse
import json
import sys
from pathlib import Path

from conesolitons.cli import main as cli

KS = {-0.75: "20,24,28,32", -0.5: "8,10,12,14,16", -0.25: "4,6,8,10"}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="smoothening", help="output directory")
    ap.add_argument("--n", type=int, default=4000, help="log-grid nodes")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes per sweep")
    args = ap.parse_args()
    rows = []
    for beta, ks in KS.items():
        out = Path(args.out) / f"beta{beta:g}"
        code = cli(["--out", str(out), "smooth", "--beta", str(beta), "--ks", ks, "--n", str(args.n), "--jobs", str(args.jobs)])
        if code:
            return code
        rep = json.loads((out / "smooth.json").read_text())
        rows.append((beta, rep["B"], rep["barrier_excess"], rep["min_ordering_gap"]))
    print(f"{'beta':>6} {'B':>10} {'excess':>11} {'order gap':>11}")
    for beta, B, ex, gap in rows:
        print(f"{beta:6.2f} {B:10.5f} {ex:11.3e} {gap:11.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
