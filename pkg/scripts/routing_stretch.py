#!/usr/bin/env python3
"""Route random vertex pairs through the pincushion and compare with BFS.

    python scripts/routing_stretch.py --n 100000 --trials 5
"""
import argparse
import sys

from rgg_lab import experiments as ex


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=100_000)
    ap.add_argument("--c", type=float, default=4.0)
    ap.add_argument("--p", default="2")
    ap.add_argument("--trials", type=int, default=5)
    ap.add_argument("--pairs", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    cfg = ex.ExperimentConfig(kind="routing", d=2, p=args.p, n_list=(args.n,), c_list=(args.c,),
                              trials=args.trials, pairs=args.pairs, master_seed=args.seed,
                              threads=args.threads)
    res = ex.run_experiment(cfg)
    cols, rows = res.table(per_trial=True)
    keep = ["trial", "connected", "tau", "route_success_rate", "route_mean_hops",
            "route_mean_bfs_hops", "route_mean_stretch", "route_tripwire_frac",
            "extremal_hops", "extremal_bfs_hops", "extremal_c_fit"]
    sys.stdout.write(ex.format_table(keep, rows, "csv"))


if __name__ == "__main__":
    main()
