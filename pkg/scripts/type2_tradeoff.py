#!/usr/bin/env python3
"""Type II error of a single-feature mean test versus the pooled
sum-of-squares test on unit-variance Gaussian features.

Writes two curve families:
  * p1 and p2 against n = N, for a dense shift (0.1 in every coordinate)
    and a sparse shift (0.1 in the first coordinate only);
  * p1 and p2 against the feature count K at n = N = 1000.
"""

import argparse
import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from simcal.aggregation import gaussian_type2_curves
from simcal.cli import write_csv


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results", type=pathlib.Path)
    parser.add_argument("--draws", default=100_000, type=int)
    parser.add_argument("--seed", default=0, type=int)
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    K = 10
    rows = []
    for n in (250, 500, 1000, 2000, 4000, 8000):
        for label, delta in (("dense", np.full(K, 0.1)),
                             ("sparse", np.eye(1, K, 0).ravel() * 0.1)):
            p1, p2 = gaussian_type2_curves(K, 1, delta, n, n, 0.05,
                                           mc_draws=args.draws, seed=args.seed)
            rows.append([label, n, p1, p2])
    write_csv(args.out_dir / "type2_vs_samples.csv",
              ["shift", "n", "p1_single_feature", "p2_sum_of_squares"], rows,
              {"K": K, "alpha": 0.05, "draws": args.draws})

    rows = []
    for k_count in (2, 5, 10, 20, 40, 80):
        for label in ("dense", "sparse"):
            delta = (np.full(k_count, 0.1) if label == "dense"
                     else np.eye(1, k_count, 0).ravel() * 0.1)
            p1, p2 = gaussian_type2_curves(k_count, 1, delta, 1000, 1000, 0.05,
                                           mc_draws=args.draws, seed=args.seed)
            rows.append([label, k_count, p1, p2])
    write_csv(args.out_dir / "type2_vs_features.csv",
              ["shift", "K", "p1_single_feature", "p2_sum_of_squares"], rows,
              {"n": 1000, "alpha": 0.05, "draws": args.draws})
    print("wrote type2_vs_samples.csv and type2_vs_features.csv")


if __name__ == "__main__":
    main()
