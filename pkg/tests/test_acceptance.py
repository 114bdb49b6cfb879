"""Acceptance criteria 1-11, each at its stated tolerance.

Every test records one ``[PASS]``/``[FAIL]`` line, printed in a block at
the end of the session (and immediately with ``-s``).
"""
import math
import time
import warnings

import numpy as np
import pytest

from rgg_lab import analysis
from rgg_lab import experiments as ex
from rgg_lab.graph_core import build_graph, build_graph_naive
from rgg_lab.lp_geometry import CapSpec, alpha, as_exponent, cap_cone_volume, lp_norm_columns
from rgg_lab.sampler import Seed, sample_unit_ball
from rgg_lab.thresholds import connectivity_threshold_constant

SEED = 20240611


@pytest.fixture
def report(record_property):
    def _report(k, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {k}: {detail}"
        print(line)
        record_property("acceptance", line)
        return ok
    return _report


def _cfg(**kw):
    kw.setdefault("master_seed", SEED)
    return ex.ExperimentConfig(**kw)


# 1 ---------------------------------------------------------------------------

def _mc_alpha(d, p, samples, rng, chunk=1_000_000):
    q = as_exponent(p)
    in_p = in_2 = 0
    for _ in range(samples // chunk):
        x = rng.uniform(-1.0, 1.0, size=(d, chunk))
        in_p += int(np.count_nonzero(lp_norm_columns(x, q) <= 1.0))
        in_2 += int(np.count_nonzero(np.sum(x * x, axis=0) <= 1.0))
    return in_p / in_2


def test_criterion_01_alpha_monte_carlo(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    worst = 0.0
    parts = []
    for d, p in [(2, 1), (2, math.inf), (3, 1), (3, 3), (4, math.inf)]:
        est = _mc_alpha(d, p, 10 ** 7, rng)
        rel = abs(est / alpha(d, p) - 1)
        worst = max(worst, rel)
        parts.append(f"({d},{p}) {rel:.1e}")
    dt = time.perf_counter() - t0
    ok = worst <= 0.01 and dt < 30
    report(1, ok, f"max rel err {worst:.2e} <= 1e-2 [{'; '.join(parts)}], {dt:.1f}s < 30s")
    assert ok


# 2 ---------------------------------------------------------------------------

def _cap_lock(value):
    return abs(value - 0.4330127018922193) <= 1e-9 and value <= 0.61418


def _cone_with_pi_prefactor(d, r, h):
    # prefactor pi in place of pi^((d-1)/2)
    return (math.pi * (2 * r - h) ** ((d - 1) / 2) * h ** ((d + 1) / 2)
            / (d * math.gamma((d + 1) / 2)))


def test_criterion_02_cap_prefactor_lock(report):
    t0 = time.perf_counter()
    v = cap_cone_volume(2, CapSpec(1.0, 0.5))
    wrong = _cone_with_pi_prefactor(2, 1.0, 0.5)
    dt = time.perf_counter() - t0
    ok = _cap_lock(v) and not _cap_lock(wrong) and dt < 1
    report(2, ok, f"cone volume {v:.9f} (target 0.43301 +- 1e-9, <= 0.61418); "
                  f"pi-prefactor variant {wrong:.4f} rejected")
    assert ok


# 3 ---------------------------------------------------------------------------

def test_criterion_03_oracle_equivalence(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    graph_mismatch = 0
    for k in range(200):
        n = int(rng.integers(0, 501))
        d = int(rng.choice([1, 2, 3, 4]))
        p = [1, 1.5, 2, 3, math.inf][int(rng.integers(5))]
        lam = float(rng.uniform(0.02, 0.6))
        pts = sample_unit_ball(n, d, Seed(SEED, k))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            graph_mismatch += not build_graph(pts, p, lam).same_edges(build_graph_naive(pts, p, lam))
    diam_mismatch = checked = 0
    k = 0
    while checked < 100:
        k += 1
        n = int(rng.integers(2, 501))
        d = int(rng.choice([1, 2, 3]))
        p = [1, 2, math.inf][int(rng.integers(3))]
        pts = sample_unit_ball(n, d, Seed(SEED + 1, k))
        lam = float(rng.uniform(0.3, 1.0)) * (1.0 if d > 1 else 0.2)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            g = build_graph(pts, p, lam)
        if not analysis.is_connected(g):
            continue
        checked += 1
        diam_mismatch += analysis.exact_diameter(g, "ifub") != analysis.exact_diameter(g, "allpairs")
    dt = time.perf_counter() - t0
    ok = graph_mismatch == 0 and diam_mismatch == 0 and dt < 60
    report(3, ok, f"graph mismatches {graph_mismatch}/200, diameter mismatches "
                  f"{diam_mismatch}/100 connected, {dt:.1f}s < 60s")
    assert ok


# 4 ---------------------------------------------------------------------------

def test_criterion_04_d1_limit_law(report):
    t0 = time.perf_counter()
    res = ex.run_experiment(_cfg(kind="d1law", d=1, n_list=(10 ** 5,), trials=1000,
                                 c_list=(0.0, 3.0)))
    c0, c3 = res.summary
    e1 = math.exp(-1.0)
    e3 = math.exp(-math.exp(-3.0))
    dt = time.perf_counter() - t0
    ok = (abs(c0["p_connected"] - e1) <= 0.05 and abs(c3["p_connected"] - e3) <= 0.03
          and abs(c0["p_no_isolated"] - e1) <= 0.05 and dt < 120)
    report(4, ok, f"Pr[conn](c=0) {c0['p_connected']:.3f} vs 0.3679+-0.05; "
                  f"Pr[conn](c=3) {c3['p_connected']:.3f} vs 0.9514+-0.03; "
                  f"Pr[no iso](c=0) {c0['p_no_isolated']:.3f} vs 0.3679+-0.05; {dt:.1f}s < 120s")
    assert ok


# 5 ---------------------------------------------------------------------------

def test_criterion_05_isolated_count(report):
    t0 = time.perf_counter()
    res = ex.run_experiment(_cfg(kind="isolated", d=2, p=2, n_list=(10 ** 5,), trials=20,
                                 c_list=(0.5,)))
    row = res.summary[0]
    target = (10 ** 5) ** 0.5
    dt = time.perf_counter() - t0
    ratio = row["mean_isolated"] / target
    ok = 0.5 <= ratio <= 2.0 and dt < 180
    report(5, ok, f"mean isolated {row['mean_isolated']:.1f} vs n^0.5 = {target:.1f} "
                  f"(ratio {ratio:.2f} in [0.5, 2]), {dt:.1f}s < 180s")
    assert ok


# 6 ---------------------------------------------------------------------------

def test_criterion_06_threshold_sharpness(report):
    t0 = time.perf_counter()
    parts = []
    ok = True
    for p in (2, math.inf):
        cs = connectivity_threshold_constant(2, p)
        res = ex.run_experiment(_cfg(kind="connectivity", d=2, p=p, n_list=(10 ** 5,), trials=50,
                                     c_list=(2.0 * cs, 0.4 * cs)))
        above, below = res.summary
        ok &= above["frac_connected"] >= 0.95 and below["frac_connected"] <= 0.2
        parts.append(f"p={p}: {above['frac_connected']:.2f} at c={2 * cs:.3f}, "
                     f"{below['frac_connected']:.2f} at c={0.4 * cs:.3f}")
    dt = time.perf_counter() - t0
    ok &= dt < 600
    report(6, ok, f"frac connected (need >=0.95 / <=0.2): {'; '.join(parts)}; {dt:.1f}s < 600s")
    assert ok


# 7 ---------------------------------------------------------------------------

def test_criterion_07_hitting_simultaneity(report):
    t0 = time.perf_counter()
    res = ex.run_experiment(_cfg(kind="hitting", d=2, p=math.inf, n_list=(10 ** 4,), trials=100))
    row = res.summary[0]
    dt = time.perf_counter() - t0
    ok = (row["frac_equal"] >= 0.8 and 0.6 <= row["median_norm_connect"] <= 1.4
          and row["frac_ordered"] == 1.0 and dt < 300)
    report(7, ok, f"equality fraction {row['frac_equal']:.2f} >= 0.8; median n*alpha*rho^2/ln n "
                  f"{row['median_norm_connect']:.3f} in [0.6, 1.4]; {dt:.1f}s < 300s")
    assert ok


# 8 ---------------------------------------------------------------------------

def test_criterion_08_diameter_sandwich(report):
    t0 = time.perf_counter()
    res = ex.run_experiment(_cfg(kind="diameter", d=2, p=2, n_list=(10 ** 4, 10 ** 5),
                                 trials=20, c_list=(4.0,), per_trial=True))
    rows = [r for r in res.trials if r.connected]
    lower_ok = all(r.diameter >= 0.9 * r.lower_bound for r in rows)
    s4, s5 = res.summary
    closer = abs(s5["mean_norm_ratio"] - 1) < abs(s4["mean_norm_ratio"] - 1)
    dt = time.perf_counter() - t0
    ok = lower_ok and closer and dt < 900
    report(8, ok, f"all {len(rows)} connected samples >= 0.9(1-h)diam/lambda: {lower_ok}; "
                  f"mean ratio n=1e4 {s4['mean_norm_ratio']:.4f} -> n=1e5 {s5['mean_norm_ratio']:.4f} "
                  f"(fitted C {s4['fitted_c_margin']:.3f}, {s5['fitted_c_margin']:.3f}); {dt:.1f}s < 900s")
    assert ok


# 9 ---------------------------------------------------------------------------

def test_criterion_09_pincushion_tau(report):
    t0 = time.perf_counter()
    res = ex.run_experiment(_cfg(kind="routing", d=2, p=2, n_list=(10 ** 5,), trials=50,
                                 c_list=(4.0,), pairs=0))
    row = res.summary[0]
    dt = time.perf_counter() - t0
    ok = row["frac_tau_within_bound"] >= 0.95 and dt < 600
    report(9, ok, f"tau <= tau_bound ({row['tau_bound']:.4f}) in {row['frac_tau_within_bound']:.2f} "
                  f"of trials, need >= 0.95 (mean tau {row['mean_tau']:.2f}, max {row['max_tau']}); "
                  f"{dt:.1f}s < 600s")
    assert ok


# 10 --------------------------------------------------------------------------

def test_criterion_10_routing_validity(report):
    t0 = time.perf_counter()
    res = ex.run_experiment(_cfg(kind="routing", d=2, p=2, n_list=(10 ** 5,), trials=20,
                                 c_list=(4.0,), pairs=100))
    row = res.summary[0]
    dt = time.perf_counter() - t0
    ok = (row["n_connected"] > 0 and row["invalid_paths"] == 0 and row["below_bfs"] == 0
          and row["success_rate"] >= 0.95 and dt < 900)
    report(10, ok, f"{row['pairs']} pairs over {row['n_connected']} connected trials: invalid "
                   f"{row['invalid_paths']}, shorter than BFS {row['below_bfs']}, success "
                   f"{row['success_rate']:.3f} >= 0.95, mean stretch {row['mean_stretch']:.2f}; "
                   f"{dt:.1f}s < 900s")
    assert ok


# 11 --------------------------------------------------------------------------

def _tables(cfg):
    out = []
    for threads in (1, 8):
        res = ex.run_experiment(ex.ExperimentConfig(**{**cfg.__dict__, "threads": threads}))
        out.append((ex.format_table(*res.table(per_trial=True), cfg.fmt)
                    + ex.format_table(*res.table(per_trial=False), cfg.fmt)).encode())
    return out


def test_criterion_11_determinism(report):
    configs = [
        _cfg(kind="connectivity", n_list=(2000, 5000), c_list=(0.8, 2.0), trials=8),
        _cfg(kind="diameter", n_list=(3000,), c_list=(4.0,), trials=8, fmt="json"),
        _cfg(kind="routing", n_list=(10 ** 4,), c_list=(4.0,), trials=8, pairs=10),
        _cfg(kind="hitting", p=math.inf, n_list=(1500,), trials=8),
        _cfg(kind="d1law", d=1, n_list=(5000,), trials=16, c_list=(0.0, 1.0)),
    ]
    same = [a == b for a, b in (_tables(c) for c in configs)]
    ok = all(same)
    report(11, ok, f"threads 1 vs 8 byte-identical for {sum(same)}/{len(same)} experiment kinds")
    assert ok
