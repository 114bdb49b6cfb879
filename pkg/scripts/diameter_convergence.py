#!/usr/bin/env python3
"""lambda * diam(G) / diam_p(B) as n grows at fixed c, with the cap lower bound and
the fitted constant of the (1 + C rho(n)) envelope.

    python scripts/diameter_convergence.py --p 1 --n 3000,10000,30000,100000
"""
import argparse

from rgg_lab import experiments as ex
from rgg_lab.lp_geometry import LpExponent


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", default="3000,10000,30000,100000")
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--p", default="2")
    ap.add_argument("--c", type=float, default=4.0)
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    cfg = ex.ExperimentConfig(kind="diameter", d=args.d, p=LpExponent.parse(args.p),
                              n_list=tuple(int(v) for v in args.n.split(",")), c_list=(args.c,),
                              trials=args.trials, master_seed=args.seed, threads=args.threads)
    res = ex.run_experiment(cfg)
    print(f"{'n':>8} {'conn':>5} {'rho':>7} {'mean ratio':>10} {'max ratio':>10} "
          f"{'min D/LB':>8} {'fit C':>7}")
    for row in res.summary:
        if row["n_connected"] == 0:
            print(f"{row['n']:>8} {0:>5}  (no connected samples)")
            continue
        print(f"{row['n']:>8} {row['n_connected']:>5} {row['rho']:7.4f} {row['mean_norm_ratio']:10.4f} "
              f"{row['max_norm_ratio']:10.4f} {row['min_diam_over_lower']:8.3f} "
              f"{row['fitted_c_margin']:7.3f}")


if __name__ == "__main__":
    main()
