#!/usr/bin/env python3
"""Empirical Pr[connected] and Pr[no isolated vertex] on [-1, 1] against exp(-exp(-c)).

    python scripts/d1_limit_law.py --n 100000 --trials 1000
"""
import argparse

import numpy as np

from rgg_lab import experiments as ex


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=100_000)
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    grid = tuple(float(c) for c in np.arange(-2.0, 4.01, 0.5))
    cfg = ex.ExperimentConfig(kind="d1law", d=1, n_list=(args.n,), c_list=grid,
                              trials=args.trials, master_seed=args.seed, threads=args.threads)
    res = ex.run_experiment(cfg)
    print(f"{'c':>6} {'limit':>8} {'P[conn]':>8} {'se':>6} {'P[noiso]':>8} {'se':>6}")
    for row in res.summary:
        print(f"{row['c']:6.2f} {row['limit']:8.4f} {row['p_connected']:8.4f} "
              f"{row['se_connected']:6.4f} {row['p_no_isolated']:8.4f} {row['se_no_isolated']:6.4f}")


if __name__ == "__main__":
    main()
