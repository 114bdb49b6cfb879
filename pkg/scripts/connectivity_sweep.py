#!/usr/bin/env python3
"""Fraction of connected samples across c = lambda^d n / ln n, around the threshold c*.

    python scripts/connectivity_sweep.py --n 20000 --p inf --trials 40
"""
import argparse
import sys

import numpy as np

from rgg_lab import experiments as ex
from rgg_lab.lp_geometry import LpExponent
from rgg_lab.thresholds import connectivity_threshold_constant


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=20000)
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--p", default="2")
    ap.add_argument("--trials", type=int, default=40)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    p = LpExponent.parse(args.p)
    cs = connectivity_threshold_constant(args.d, p)
    grid = tuple(float(x) for x in np.round(cs * np.linspace(0.4, 2.0, 9), 6))
    cfg = ex.ExperimentConfig(kind="connectivity", d=args.d, p=p, n_list=(args.n,),
                              c_list=grid, trials=args.trials, master_seed=args.seed,
                              threads=args.threads)
    res = ex.run_experiment(cfg)
    print(f"# d={args.d} p={p} n={args.n}  c* = {cs:.5f}", file=sys.stderr)
    cols = ["c", "lam", "frac_connected", "se_connected", "frac_no_isolated", "mean_isolated",
            "mean_components"]
    sys.stdout.write(ex.format_table(cols, res.summary, "csv"))


if __name__ == "__main__":
    main()
