#!/usr/bin/env python3
"""Regime map of the clustering decay over the (a, beta) plane."""

import argparse
import sys

from sirg.cli import main as sirg_main


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="phase-out")
    parser.add_argument("--resolution", type=int, default=60)
    args = parser.parse_args()
    return sirg_main([
        "phase-diagram", "--a-min", "0", "--a-max", "4",
        "--beta-min", "2.05", "--beta-max", "6.0",
        "--resolution", str(args.resolution), "--out", args.out,
    ])


if __name__ == "__main__":
    sys.exit(main())
