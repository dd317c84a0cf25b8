#!/usr/bin/env python3
"""Sweep the binomial scaling parameter for the two-point worked instance
(P: X in {2,4} equal weights, Q: X = 2, n = 1) and write the divergence,
analytic derivative and finite-difference derivative to CSV."""

import argparse
import json
import sys
import tempfile

from mismatchkl.cli import main as cli_main


def build_config(points: int) -> dict:
    step = (1.6 - 0.2) / (points - 1)
    return {
        "family": "binomial",
        "n": 1,
        "grid": [0.2 + i * step for i in range(points)],
        "p_prior": {"support": [2.0, 4.0], "weights": [0.5, 0.5]},
        "q_prior": {"support": [2.0], "weights": [1.0]},
        "tolerance": {"abs_tol": 1e-9, "rel_tol": 1e-5},
        "epsilon": 1e-12,
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=15, help="grid size")
    parser.add_argument("--format", choices=["csv", "json"], default="csv")
    args = parser.parse_args()

    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
        json.dump(build_config(args.points), fh)
        path = fh.name
    sys.exit(cli_main(["sweep", "--config", path, "--format", args.format]))


if __name__ == "__main__":
    main()
