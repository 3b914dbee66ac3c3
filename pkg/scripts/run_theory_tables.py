#!/usr/bin/env python3
"""Theory tables for one canonical parameter set per clustering regime.

For each set this writes theory.csv (inverse mean degree, decay law,
triangle bounds, Monte Carlo triangle integral, clustering function and the
limiting-constant candidates along a degree grid) plus limit_ratios.csv
(scale-ratio convergence toward the closed-form limits).
"""

import argparse
import pathlib
import sys

from sirg.cli import main as sirg_main

REGIME_SETS = {
    "inverse_linear": "d=1\nalpha=inf\nbeta=4.0\na=1.0\n",
    "critical_log": "d=1\nalpha=inf\nbeta=3.5\na=2.0\n",
    "polynomial": "d=1\nalpha=inf\nbeta=3.25\na=2.0\n",
    "critical_logsq": "d=1\nalpha=2.0\nbeta=3.0\na=2.0\n",
    "constant": "d=1\nalpha=2.0\nbeta=2.5\na=2.0\n",
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="theory-out")
    parser.add_argument("--samples", type=int, default=200_000)
    parser.add_argument("--k-grid", default="16,64,256,1024,4096")
    args = parser.parse_args()
    out_root = pathlib.Path(args.out)
    out_root.mkdir(parents=True, exist_ok=True)
    for name, params in REGIME_SETS.items():
        cfg = out_root / f"{name}.params"
        cfg.write_text(params)
        code = sirg_main([
            "theory", "--params", str(cfg), "--k-grid", args.k_grid,
            "--samples", str(args.samples), "--out", str(out_root / name),
        ])
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
