#!/usr/bin/env python3
"""Where do empty petals sit?  Histogram of |midpoint| of empty petals over trials,
next to the ceiling tau_bound evaluated with the inscribed-ball petal volume.

    python scripts/tau_probe.py --n 100000 --trials 200
"""
import argparse

import numpy as np

from rgg_lab.lp_geometry import xi_lower_bound
from rgg_lab.pincushion import EMPTY, build_pincushion, default_parameters, petal_occupancy, tau_bound
from rgg_lab.sampler import Seed, sample_unit_ball
from rgg_lab.thresholds import lambda_from_c


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=100_000)
    ap.add_argument("--c", type=float, default=4.0)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    n, d, p = args.n, 2, 2
    lam = lambda_from_c(n, d, args.c)
    prm = default_parameters(n, d, p, lam)
    pc = build_pincushion(d, p, prm.sigma, prm.r, lam)
    xi = xi_lower_bound(d, p, lam, prm.r)
    bound = tau_bound(prm.sigma, prm.r, n, xi, d)
    print(f"lambda={lam:.6g} sigma={prm.sigma} r={prm.r:.6g} rho={prm.rho:.5f} "
          f"petals/pin={pc.max_petals} n*xi={n * xi:.3f} tau_bound={bound:.4f}")

    taus, where = [], []
    for t in range(args.trials):
        occ = petal_occupancy(pc, sample_unit_ball(n, d, Seed(args.seed, t)))
        taus.append(occ.tau)
        for pin, o in zip(pc.pins, occ.occupants):
            where.extend(np.abs(pin.petal_midpoints()[o == EMPTY]).tolist())
    taus = np.array(taus)
    edges = [0, 0.5, 0.9, 0.98, 0.99, 1.0]
    hist, _ = np.histogram(where, bins=edges)
    print(f"P(tau <= bound) = {np.mean(taus <= bound):.3f}   mean tau = {taus.mean():.3f}")
    print("empty petals by |midpoint|:")
    for lo, hi, k in zip(edges, edges[1:], hist):
        print(f"  [{lo:.2f}, {hi:.2f})  {k}")


if __name__ == "__main__":
    main()
