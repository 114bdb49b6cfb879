"""Monte Carlo harness: parameter sweeps, deterministic parallel trials and
result tables.

Trial ``t`` of the ``i``-th entry of ``n_list`` draws its points from the
stream ``Seed(master_seed, (i << 32) | t)``; every lambda in a sweep reuses
that point set.  Rows are assembled in (n, trial, lambda) order, so output
does not depend on the worker count.
"""
from __future__ import annotations

import csv
import io
import json
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial

import numpy as np

from . import analysis
from .analysis import UNDEFINED
from .errors import RegimeError, ResourceError, UsageError
from .graph_core import build_graph, expected_degree
from .lp_geometry import (LpExponent, PLike, alpha, as_exponent, lp_norm_columns,
                          unit_ball_lp_diameter, xi_lower_bound)
from .pincushion import (build_pincushion, default_parameters, is_valid_path,
                         petal_occupancy, route, tau_bound)
from .sampler import PointSet, Seed, sample_d1, sample_unit_ball
from .thresholds import (cap_height_schedule, default_gamma, default_K,
                         diameter_lower_bound, lambda_d1, lambda_from_c,
                         lambda_isolated_threshold, rho_schedule,
                         tight_upper_bound)

KINDS = ("connectivity", "isolated", "d1law", "hitting", "diameter", "routing", "geometry")


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    d: int = 2
    p: LpExponent = field(default_factory=lambda: LpExponent(2))
    n_list: tuple = (1000,)
    lam: float | None = None
    c_list: tuple | None = None
    gamma_mode: str = "default"
    trials: int = 10
    master_seed: int = 0
    threads: int = 1
    out: str | None = None
    fmt: str = "csv"
    per_trial: bool = False
    timing: bool = False
    pairs: int = 100
    c_margin: float = 1.0
    sigma: int | None = None
    r: float | None = None
    detour_budget: int | None = None
    K: float | None = None
    mem_cap_gb: float = 4.0

    def __post_init__(self):
        object.__setattr__(self, "p", as_exponent(self.p))
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        if self.c_list is not None:
            object.__setattr__(self, "c_list", tuple(float(c) for c in self.c_list))
        self.validate()

    def validate(self):
        if self.kind not in KINDS:
            raise UsageError(f"unknown experiment kind {self.kind!r}")
        if int(self.d) != self.d or self.d < 1:
            raise UsageError("d must be a positive integer")
        if self.trials < 1:
            raise UsageError("trials must be >= 1")
        if not self.n_list or min(self.n_list) < 2:
            raise UsageError("n_list must be nonempty with every n >= 2")
        if self.threads < 1:
            raise UsageError("threads must be >= 1")
        if self.fmt not in ("csv", "json"):
            raise UsageError("format must be csv or json")
        if self.lam is not None and not self.lam > 0:
            raise UsageError("lambda must be positive")
        gamma_of(self, 100)
        if self.kind in ("hitting", "routing") and self.d < 2:
            raise UsageError(f"{self.kind} needs d >= 2")
        if self.kind == "d1law" and self.d != 1:
            raise UsageError("d1law needs d = 1")
        if self.kind == "isolated":
            if self.d != 2:
                raise UsageError("isolated needs d = 2")
            if self.lam is not None or not self.c_list:
                raise UsageError("isolated needs --c (lambda = sqrt(c ln n / n))")
            bad = [c for c in self.c_list if not 0 <= c < 1 / alpha(2, self.p)]
            if bad:
                raise UsageError(f"isolated needs 0 <= c < 1/alpha = {1 / alpha(2, self.p):.6g}; got {bad}")
        if self.kind == "routing" and (self.sigma is None) != (self.r is None):
            raise UsageError("pass both --sigma and --r, or neither")


def gamma_of(cfg: ExperimentConfig, n: int) -> float:
    mode = cfg.gamma_mode
    if mode == "default":
        return default_gamma(n)
    if mode.startswith("const:"):
        try:
            g = float(mode.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad gamma mode {mode!r}") from None
        return g
    raise UsageError(f"gamma mode must be 'default' or 'const:F', got {mode!r}")


@dataclass(frozen=True)
class LambdaSpec:
    lam: float
    label: str
    c: float | None = None
    gamma: float | None = None


def lambda_specs(cfg: ExperimentConfig, n: int) -> list[LambdaSpec]:
    """Explicit lambda beats the constant-c form, which beats the threshold form."""
    if cfg.lam is not None:
        return [LambdaSpec(cfg.lam, "explicit")]
    if cfg.c_list:
        if cfg.d == 1:
            return [LambdaSpec(lambda_d1(n, c, "connect"), f"d1_connect(c={c!r})", c=c)
                    for c in cfg.c_list]
        return [LambdaSpec(lambda_from_c(n, cfg.d, c), f"c={c!r}", c=c) for c in cfg.c_list]
    g = gamma_of(cfg, n)
    if cfg.d == 1:
        return [LambdaSpec(lambda_d1(n, g, "connect"), f"d1_connect(gamma={g!r})", gamma=g)]
    return [LambdaSpec(lambda_isolated_threshold(cfg.d, cfg.p, n, g),
                       f"threshold(gamma={g!r})", gamma=g)]


# -- rows ----------------------------------------------------------------------

@dataclass
class TrialResult:
    kind: str
    trial: int
    n: int
    d: int
    p: str
    lam: float | None = None
    lambda_spec: str | None = None
    c: float | None = None
    gamma: float | None = None
    connected: bool | None = None
    component_count: int | None = None
    isolated_count: int | None = None
    no_isolated: bool | None = None
    diameter: object = None
    rho_connect: float | None = None
    rho_mindeg1: float | None = None
    hitting_equal: bool | None = None
    norm_rho_connect: float | None = None
    norm_rho_mindeg1: float | None = None
    h: float | None = None
    rho: float | None = None
    lower_bound: float | None = None
    tight_bound: float | None = None
    norm_ratio: float | None = None
    c_fit: float | None = None
    sigma: int | None = None
    r: float | None = None
    non_asymptotic: bool | None = None
    tau: int | None = None
    tau_bound: float | None = None
    route_pairs: int | None = None
    route_success_rate: float | None = None
    route_invalid: int | None = None
    route_below_bfs: int | None = None
    route_mean_hops: float | None = None
    route_max_hops: int | None = None
    route_mean_bfs_hops: float | None = None
    route_mean_stretch: float | None = None
    route_join_fallbacks: int | None = None
    route_tripwire_frac: float | None = None
    extremal_hops: int | None = None
    extremal_bfs_hops: int | None = None
    extremal_c_fit: float | None = None
    wall_time: float | None = None


TRIAL_DOCS = {
    "kind": "experiment kind",
    "trial": "trial index (seed stream low word)",
    "n": "number of vertices",
    "d": "dimension",
    "p": "metric exponent",
    "lam": "adjacency radius used",
    "lambda_spec": "how lambda was specified (explicit / c=... / threshold(gamma=...))",
    "c": "constant c of lambda = (c ln n / n)^(1/d), or the d=1 constant",
    "gamma": "gamma(n) used by the threshold form",
    "connected": "graph connected",
    "component_count": "number of connected components",
    "isolated_count": "number of degree-0 vertices",
    "no_isolated": "no degree-0 vertex (d1law: at the isolated-vertex radius)",
    "diameter": "exact hop diameter, UNDEFINED if disconnected",
    "rho_connect": "smallest lambda making the graph connected (MST bottleneck)",
    "rho_mindeg1": "smallest lambda giving minimum degree 1 (max NN distance)",
    "hitting_equal": "rho_connect == rho_mindeg1",
    "norm_rho_connect": "n alpha rho_connect^d / ln n",
    "norm_rho_mindeg1": "n alpha rho_mindeg1^d / ln n",
    "h": "cap height schedule value",
    "rho": "rho(n) schedule value",
    "lower_bound": "(1-h) diam_p(B) / lambda",
    "tight_bound": "diam_p(B) (1 + C rho) / lambda with C = c_margin",
    "norm_ratio": "lambda diam(G) / diam_p(B)",
    "c_fit": "(norm_ratio - 1) / rho: the C this sample needs",
    "sigma": "pincushion angle resolution",
    "r": "pin center spacing",
    "non_asymptotic": "sigma, r supplied by the user instead of the schedule",
    "tau": "max number of empty petals over pins",
    "tau_bound": "sigma^((d-1)/2) (2/r) exp(-n xi_rel)",
    "route_pairs": "routed vertex pairs (sampled plus the extremal pair)",
    "route_success_rate": "fraction of pairs routed without FAILURE",
    "route_invalid": "returned paths with a non-edge step",
    "route_below_bfs": "returned paths shorter than the BFS distance",
    "route_mean_hops": "mean routed hops over successes",
    "route_max_hops": "max routed hops over successes",
    "route_mean_bfs_hops": "mean BFS hops over successes",
    "route_mean_stretch": "mean routed/BFS hops over successes with x != y",
    "route_join_fallbacks": "joins that needed unrestricted BFS",
    "route_tripwire_frac": "fraction of successes above K ||x-y||_2 / lambda",
    "extremal_hops": "routed hops for the l_p-farthest pair",
    "extremal_bfs_hops": "BFS hops for the l_p-farthest pair",
    "extremal_c_fit": "(lambda hops / diam_p(B) - 1) / rho for the farthest pair",
    "wall_time": "seconds spent on the trial (only with --timing)",
}

TRIAL_COLUMNS = {
    "connectivity": ["kind", "trial", "n", "d", "p", "lam", "lambda_spec", "c", "gamma",
                     "connected", "component_count", "isolated_count", "no_isolated"],
    "isolated": ["kind", "trial", "n", "d", "p", "lam", "lambda_spec", "c", "isolated_count"],
    "d1law": ["kind", "trial", "n", "d", "p", "c", "lam", "connected", "no_isolated"],
    "hitting": ["kind", "trial", "n", "d", "p", "rho_connect", "rho_mindeg1",
                "hitting_equal", "norm_rho_connect", "norm_rho_mindeg1"],
    "diameter": ["kind", "trial", "n", "d", "p", "lam", "lambda_spec", "c", "gamma",
                 "connected", "diameter", "h", "rho", "lower_bound", "tight_bound",
                 "norm_ratio", "c_fit"],
    "routing": ["kind", "trial", "n", "d", "p", "lam", "lambda_spec", "c", "gamma",
                "connected", "sigma", "r", "rho", "non_asymptotic", "tau", "tau_bound",
                "route_pairs", "route_success_rate", "route_invalid", "route_below_bfs",
                "route_mean_hops", "route_max_hops", "route_mean_bfs_hops",
                "route_mean_stretch", "route_join_fallbacks", "route_tripwire_frac",
                "extremal_hops", "extremal_bfs_hops", "extremal_c_fit"],
}

SUMMARY_DOCS = {
    "n": "number of vertices", "d": "dimension", "p": "metric exponent",
    "lam": "adjacency radius", "lambda_spec": "lambda specification",
    "c": "constant c", "gamma": "gamma(n)", "trials": "trials aggregated",
    "frac_connected": "fraction of trials connected",
    "se_connected": "standard error of frac_connected",
    "frac_no_isolated": "fraction of trials without isolated vertices",
    "se_no_isolated": "standard error of frac_no_isolated",
    "mean_isolated": "mean isolated-vertex count",
    "var_isolated": "sample variance of the isolated-vertex count",
    "predicted_isolated": "n^(1 - alpha c)",
    "mean_components": "mean component count",
    "lam_connect": "d=1 connectivity radius 2(ln n + c)/n",
    "lam_isolated": "d=1 isolated-vertex radius (ln n + c)/n",
    "p_connected": "empirical Pr[connected] at lam_connect",
    "p_no_isolated": "empirical Pr[no isolated vertex] at lam_isolated",
    "limit": "exp(-exp(-c))",
    "frac_equal": "fraction of trials with rho_connect == rho_mindeg1",
    "frac_ordered": "fraction of trials with rho_connect >= rho_mindeg1",
    "median_norm_connect": "median n alpha rho_connect^d / ln n",
    "median_norm_mindeg1": "median n alpha rho_mindeg1^d / ln n",
    "norm_limit": "2(d-1)/d",
    "n_connected": "connected trials", "n_disconnected": "disconnected trials (recorded, not retried)",
    "h": "cap height", "rho": "rho(n)",
    "frac_above_lower": "fraction of connected trials with diam >= 0.9 * lower bound",
    "min_diam_over_lower": "min diam(G) / lower bound",
    "mean_norm_ratio": "mean lambda diam(G) / diam_p(B)",
    "max_norm_ratio": "max lambda diam(G) / diam_p(B)",
    "fitted_c_margin": "smallest C with every sample under diam_p(B)(1 + C rho)/lambda",
    "tight_bound": "tight bound at the configured c_margin",
    "sigma": "pincushion sigma", "r": "pin spacing", "non_asymptotic": "user-supplied sigma, r",
    "tau_bound": "tau ceiling", "mean_tau": "mean tau", "max_tau": "max tau",
    "frac_tau_within_bound": "fraction of trials with tau <= tau_bound",
    "pairs": "routed pairs in total", "success_rate": "overall route success rate",
    "invalid_paths": "returned paths with a non-edge step",
    "below_bfs": "returned paths shorter than BFS (must be 0)",
    "mean_hops": "mean routed hops", "mean_bfs_hops": "mean BFS hops",
    "mean_stretch": "mean stretch routed/BFS", "join_fallbacks": "joins needing unrestricted BFS",
    "tripwire_frac": "fraction above K ||x-y||_2 / lambda (reported, not asserted)",
    "extremal_c_fit": "max over trials of the farthest pair's fitted C",
}


def _trial_seed(cfg, n_index, trial):
    return Seed(cfg.master_seed, (n_index << 32) | trial)


def _pair_rng(seed: Seed) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed.master, spawn_key=(seed.stream, 1))
    return np.random.Generator(np.random.PCG64(ss))


def _base(cfg, trial, n, spec=None) -> TrialResult:
    row = TrialResult(cfg.kind, trial, n, cfg.d, str(cfg.p))
    if spec is not None:
        row.lam, row.lambda_spec, row.c, row.gamma = spec.lam, spec.label, spec.c, spec.gamma
    return row


# -- per-kind trial bodies -------------------------------------------------------

def _trial_connectivity(cfg, trial, n, seed):
    rows = []
    if cfg.d == 1:
        x = sample_d1(n, seed)
        gaps = np.diff(x)
        for spec in lambda_specs(cfg, n):
            row = _base(cfg, trial, n, spec)
            comps = 1 + int(np.count_nonzero(gaps > spec.lam))
            row.connected = comps == 1
            row.component_count = comps
            row.isolated_count = analysis.d1_isolated_count(x, spec.lam)
            row.no_isolated = row.isolated_count == 0
            rows.append(row)
        return rows
    pts = sample_unit_ball(n, cfg.d, seed)
    for spec in lambda_specs(cfg, n):
        row = _base(cfg, trial, n, spec)
        g = build_graph(pts, cfg.p, spec.lam)
        lab = analysis.connected_components(g)
        row.connected = lab.count == 1
        row.component_count = lab.count
        row.isolated_count = analysis.count_isolated(g)
        row.no_isolated = row.isolated_count == 0
        rows.append(row)
    return rows


def _trial_isolated(cfg, trial, n, seed):
    pts = sample_unit_ball(n, cfg.d, seed)
    rows = []
    for spec in lambda_specs(cfg, n):
        row = _base(cfg, trial, n, spec)
        if spec.lam == 0.0:
            row.isolated_count = n
        else:
            row.isolated_count = analysis.count_isolated(build_graph(pts, cfg.p, spec.lam))
        rows.append(row)
    return rows


D1LAW_DEFAULT_C = (-1.0, 0.0, 1.0, 2.0, 3.0)


def _trial_d1law(cfg, trial, n, seed):
    x = sample_d1(n, seed)
    rows = []
    for c in cfg.c_list or D1LAW_DEFAULT_C:
        row = _base(cfg, trial, n)
        row.c = c
        row.lam = lambda_d1(n, c, "connect")
        row.connected = analysis.d1_is_connected(x, row.lam)
        row.no_isolated = analysis.d1_isolated_count(x, lambda_d1(n, c, "isolated")) == 0
        rows.append(row)
    return rows


def _trial_hitting(cfg, trial, n, seed):
    pts = sample_unit_ball(n, cfg.d, seed)
    hr = analysis.hitting_radii(pts, cfg.p)
    row = _base(cfg, trial, n)
    a = alpha(cfg.d, cfg.p)
    row.rho_connect, row.rho_mindeg1 = hr.rho_connect, hr.rho_mindeg1
    row.hitting_equal = hr.simultaneous
    row.norm_rho_connect = n * a * hr.rho_connect ** cfg.d / math.log(n)
    row.norm_rho_mindeg1 = n * a * hr.rho_mindeg1 ** cfg.d / math.log(n)
    return [row]


def _trial_diameter(cfg, trial, n, seed):
    pts = sample_unit_ball(n, cfg.d, seed)
    diam_p = unit_ball_lp_diameter(cfg.d, cfg.p)
    rows = []
    for spec in lambda_specs(cfg, n):
        row = _base(cfg, trial, n, spec)
        g = build_graph(pts, cfg.p, spec.lam)
        D = analysis.exact_diameter(g)
        row.connected = D is not UNDEFINED
        row.diameter = D
        row.h = cap_height_schedule(n, cfg.d)
        row.rho = rho_schedule(n, cfg.d, cfg.p) if n >= 16 else None
        row.lower_bound = diameter_lower_bound(cfg.d, cfg.p, spec.lam, row.h)
        if n >= 16:
            row.tight_bound = tight_upper_bound(cfg.d, cfg.p, spec.lam, n, cfg.c_margin)
        if row.connected:
            row.norm_ratio = spec.lam * D / diam_p
            if row.rho:
                row.c_fit = (row.norm_ratio - 1.0) / row.rho
        rows.append(row)
    return rows


def extremal_pair(points: PointSet, p: PLike) -> tuple[int, int]:
    """Two points at maximum l_p distance.

    A norm is convex, so the maximum over the hull is attained at hull
    vertices and only those are compared.
    """
    p = as_exponent(p)
    cols = points.columns
    n = points.n
    cand = np.arange(n)
    if points.d == 1:
        return int(np.argmin(cols[0])), int(np.argmax(cols[0]))
    if n > 64:
        from scipy.spatial import ConvexHull
        try:
            cand = np.unique(ConvexHull(points.coords).vertices)
        except Exception:
            cand = np.arange(n)
    best, pair = -1.0, (0, min(1, n - 1))
    for k, u in enumerate(cand[:-1]):
        rest = cand[k + 1:]
        dist = lp_norm_columns(cols[:, rest] - cols[:, u:u + 1], p)
        j = int(np.argmax(dist))
        if dist[j] > best:
            best, pair = float(dist[j]), (int(u), int(rest[j]))
    return pair


def _sample_pairs(rng, n, count):
    seen = set()
    out = []
    limit = n * (n - 1) // 2
    count = min(count, limit)
    while len(out) < count:
        u, v = (int(t) for t in rng.integers(0, n, size=2))
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        if key in seen:
            continue
        seen.add(key)
        out.append((u, v))
    return out


def _trial_routing(cfg, trial, n, seed):
    pts = sample_unit_ball(n, cfg.d, seed)
    diam_p = unit_ball_lp_diameter(cfg.d, cfg.p)
    K = cfg.K if cfg.K is not None else default_K(cfg.d, cfg.p)
    rows = []
    for spec in lambda_specs(cfg, n):
        row = _base(cfg, trial, n, spec)
        row.rho = rho_schedule(n, cfg.d, cfg.p)
        if cfg.sigma is not None:
            row.sigma, row.r, row.non_asymptotic = cfg.sigma, cfg.r, True
        else:
            try:
                prm = default_parameters(n, cfg.d, cfg.p, spec.lam)
            except RegimeError as exc:
                raise UsageError(f"{exc}; use --sigma/--r for a NON-ASYMPTOTIC run") from None
            row.sigma, row.r, row.non_asymptotic = prm.sigma, prm.r, False
        pc = build_pincushion(cfg.d, cfg.p, row.sigma, row.r, spec.lam)
        occ = petal_occupancy(pc, pts)
        row.tau = occ.tau
        row.tau_bound = tau_bound(row.sigma, row.r, n,
                                  xi_lower_bound(cfg.d, cfg.p, spec.lam, row.r), cfg.d)
        g = build_graph(pts, cfg.p, spec.lam)
        row.connected = analysis.is_connected(g)
        if not row.connected or cfg.pairs <= 0:
            rows.append(row)
            continue
        pairs = _sample_pairs(_pair_rng(seed), n, cfg.pairs)
        ext = extremal_pair(pts, cfg.p)
        pairs.append(ext)
        ok = invalid = below = fallbacks = trip = 0
        hops, bfs_hops, stretch = [], [], []
        for k, (x, y) in enumerate(pairs):
            res = route(g, pts, pc, occ, x, y, cfg.detour_budget)
            if not res.ok:
                continue
            ok += 1
            if not is_valid_path(g, res.path) or res.path[0] != x or res.path[-1] != y:
                invalid += 1
            dg = int(analysis._bfs_raw(g, x)[y])
            h = res.hops
            below += h < dg
            fallbacks += res.join_fallback
            hops.append(h)
            bfs_hops.append(dg)
            if dg > 0:
                stretch.append(h / dg)
            e2 = float(np.sqrt(np.sum((pts[x] - pts[y]) ** 2)))
            trip += h > K * e2 / spec.lam
            if k == len(pairs) - 1:
                row.extremal_hops, row.extremal_bfs_hops = h, dg
                row.extremal_c_fit = (spec.lam * h / diam_p - 1.0) / row.rho
        row.route_pairs = len(pairs)
        row.route_success_rate = ok / len(pairs)
        row.route_invalid, row.route_below_bfs = invalid, int(below)
        row.route_join_fallbacks = int(fallbacks)
        if ok:
            row.route_mean_hops = float(np.mean(hops))
            row.route_max_hops = int(max(hops))
            row.route_mean_bfs_hops = float(np.mean(bfs_hops))
            row.route_mean_stretch = float(np.mean(stretch)) if stretch else 1.0
            row.route_tripwire_frac = trip / ok
        rows.append(row)
    return rows


_BODIES = {
    "connectivity": _trial_connectivity,
    "isolated": _trial_isolated,
    "d1law": _trial_d1law,
    "hitting": _trial_hitting,
    "diameter": _trial_diameter,
    "routing": _trial_routing,
}


def _run_unit(cfg, unit):
    n_index, trial = unit
    n = cfg.n_list[n_index]
    t0 = time.perf_counter()
    rows = _BODIES[cfg.kind](cfg, trial, n, _trial_seed(cfg, n_index, trial))
    if cfg.timing:
        dt = time.perf_counter() - t0
        for row in rows:
            row.wall_time = dt
    return rows


# -- guardrail -------------------------------------------------------------------

def estimate_memory_bytes(cfg: ExperimentConfig) -> int:
    """Rough peak bytes: coordinates plus CSR adjacency and build temporaries."""
    peak = 0
    for n in cfg.n_list:
        lams = [s.lam for s in lambda_specs(cfg, n)] if cfg.kind not in ("d1law", "hitting") else []
        deg = max([min(expected_degree(n, cfg.d, cfg.p, lam), n) for lam in lams] or [0.0])
        if cfg.kind == "hitting":
            # Prim stores O(n) rows; the sparse route builds near the connectivity radius
            deg = 4.0 * math.log(n)
        peak = max(peak, n * cfg.d * 8 * 4 + n * deg * 8 * 6)
    return int(peak * cfg.threads)


def check_resources(cfg: ExperimentConfig):
    need = estimate_memory_bytes(cfg)
    cap = cfg.mem_cap_gb * 2 ** 30
    if need > cap:
        raise ResourceError(f"estimated memory {need / 2 ** 30:.2f} GiB exceeds the cap of "
                            f"{cfg.mem_cap_gb:g} GiB; lower n, threads or lambda, or raise --mem-cap-gb")


# -- driver ----------------------------------------------------------------------

@dataclass
class ExperimentResult:
    config: ExperimentConfig
    trials: list
    summary: list

    def table(self, per_trial: bool | None = None) -> tuple[list, list]:
        """``(columns, rows as dicts)`` for output."""
        if per_trial is None:
            per_trial = self.config.per_trial
        if per_trial:
            cols = list(TRIAL_COLUMNS[self.config.kind])
            if self.config.timing:
                cols.append("wall_time")
            return cols, [{c: getattr(r, c) for c in cols} for r in self.trials]
        cols = list(self.summary[0].keys()) if self.summary else []
        return cols, self.summary


def run_trials(cfg: ExperimentConfig) -> list:
    if cfg.kind == "geometry":
        raise UsageError("geometry has no trials")
    check_resources(cfg)
    units = [(i, t) for i in range(len(cfg.n_list)) for t in range(cfg.trials)]
    if cfg.threads == 1:
        chunks = [_run_unit(cfg, u) for u in units]
    else:
        with ProcessPoolExecutor(max_workers=cfg.threads) as ex:
            chunks = list(ex.map(partial(_run_unit, cfg), units))
    return [row for chunk in chunks for row in chunk]


def _se(frac, m):
    return math.sqrt(frac * (1.0 - frac) / m) if m else None


def _groups(rows, key):
    out = {}
    for r in rows:
        out.setdefault(key(r), []).append(r)
    return out


def summarize(cfg: ExperimentConfig, rows: list) -> list:
    kind = cfg.kind
    out = []
    if kind == "d1law":
        for (n, c), grp in _groups(rows, lambda r: (r.n, r.c)).items():
            m = len(grp)
            pc = sum(r.connected for r in grp) / m
            pn = sum(r.no_isolated for r in grp) / m
            out.append({"n": n, "c": c, "trials": m,
                        "lam_connect": lambda_d1(n, c, "connect"),
                        "lam_isolated": lambda_d1(n, c, "isolated"),
                        "p_connected": pc, "se_connected": _se(pc, m),
                        "p_no_isolated": pn, "se_no_isolated": _se(pn, m),
                        "limit": math.exp(-math.exp(-c))})
        return out
    if kind == "hitting":
        for n, grp in _groups(rows, lambda r: r.n).items():
            m = len(grp)
            out.append({"n": n, "d": cfg.d, "p": str(cfg.p), "trials": m,
                        "frac_equal": sum(r.hitting_equal for r in grp) / m,
                        "frac_ordered": sum(r.rho_connect >= r.rho_mindeg1 for r in grp) / m,
                        "median_norm_connect": statistics.median(r.norm_rho_connect for r in grp),
                        "median_norm_mindeg1": statistics.median(r.norm_rho_mindeg1 for r in grp),
                        "norm_limit": 2.0 * (cfg.d - 1) / cfg.d})
        return out
    for (n, label), grp in _groups(rows, lambda r: (r.n, r.lambda_spec)).items():
        m = len(grp)
        head = {"n": n, "d": cfg.d, "p": str(cfg.p), "lam": grp[0].lam,
                "lambda_spec": label, "c": grp[0].c, "gamma": grp[0].gamma, "trials": m}
        if kind == "connectivity":
            fc = sum(r.connected for r in grp) / m
            fi = sum(r.no_isolated for r in grp) / m
            head.update({"frac_connected": fc, "se_connected": _se(fc, m),
                         "frac_no_isolated": fi, "se_no_isolated": _se(fi, m),
                         "mean_isolated": statistics.fmean(r.isolated_count for r in grp),
                         "mean_components": statistics.fmean(r.component_count for r in grp)})
        elif kind == "isolated":
            xs = [r.isolated_count for r in grp]
            head.update({"mean_isolated": statistics.fmean(xs),
                         "var_isolated": statistics.variance(xs) if m > 1 else 0.0,
                         "predicted_isolated": n ** (1.0 - alpha(2, cfg.p) * grp[0].c)})
        elif kind == "diameter":
            conn = [r for r in grp if r.connected]
            head.update({"n_connected": len(conn), "n_disconnected": m - len(conn),
                         "h": grp[0].h, "rho": grp[0].rho,
                         "lower_bound": grp[0].lower_bound,
                         "tight_bound": grp[0].tight_bound})
            if conn:
                ratios = [r.norm_ratio for r in conn]
                head.update({
                    "frac_above_lower": sum(r.diameter >= 0.9 * r.lower_bound for r in conn) / len(conn),
                    "min_diam_over_lower": min(r.diameter / r.lower_bound for r in conn),
                    "mean_norm_ratio": statistics.fmean(ratios),
                    "max_norm_ratio": max(ratios),
                    "fitted_c_margin": max(r.c_fit for r in conn) if conn[0].rho else None,
                })
        elif kind == "routing":
            conn = [r for r in grp if r.connected]
            head.update({"sigma": grp[0].sigma, "r": grp[0].r, "rho": grp[0].rho,
                         "non_asymptotic": grp[0].non_asymptotic,
                         "tau_bound": grp[0].tau_bound,
                         "mean_tau": statistics.fmean(r.tau for r in grp),
                         "max_tau": max(r.tau for r in grp),
                         "frac_tau_within_bound": sum(r.tau <= r.tau_bound for r in grp) / m,
                         "n_connected": len(conn), "n_disconnected": m - len(conn)})
            routed = [r for r in conn if r.route_pairs]
            if routed:
                pairs = sum(r.route_pairs for r in routed)
                succ = sum(r.route_success_rate * r.route_pairs for r in routed)
                with_hops = [r for r in routed if r.route_mean_hops is not None]
                head.update({
                    "pairs": pairs, "success_rate": succ / pairs,
                    "invalid_paths": sum(r.route_invalid for r in routed),
                    "below_bfs": sum(r.route_below_bfs for r in routed),
                    "mean_hops": statistics.fmean(r.route_mean_hops for r in with_hops) if with_hops else None,
                    "mean_bfs_hops": statistics.fmean(r.route_mean_bfs_hops for r in with_hops) if with_hops else None,
                    "mean_stretch": statistics.fmean(r.route_mean_stretch for r in with_hops) if with_hops else None,
                    "join_fallbacks": sum(r.route_join_fallbacks for r in routed),
                    "tripwire_frac": statistics.fmean(r.route_tripwire_frac for r in with_hops) if with_hops else None,
                    "extremal_c_fit": max((r.extremal_c_fit for r in routed if r.extremal_c_fit is not None), default=None),
                })
        out.append(head)
    return out


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    rows = run_trials(cfg)
    return ExperimentResult(cfg, rows, summarize(cfg, rows))


def run_connectivity(cfg):
    return run_experiment(replace(cfg, kind="connectivity"))


def run_d1_law(cfg):
    return run_experiment(replace(cfg, kind="d1law"))


def run_isolated_count(cfg):
    return run_experiment(replace(cfg, kind="isolated"))


def run_hitting(cfg):
    return run_experiment(replace(cfg, kind="hitting"))


def run_diameter(cfg):
    return run_experiment(replace(cfg, kind="diameter"))


def run_routing(cfg):
    return run_experiment(replace(cfg, kind="routing"))


# -- formatting ------------------------------------------------------------------

def _cell(v):
    if v is None:
        return ""
    if v is UNDEFINED:
        return "UNDEFINED"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _json_value(v):
    if v is UNDEFINED:
        return "UNDEFINED"
    if isinstance(v, np.generic):
        return v.item()
    return v


def format_table(columns: list, rows: list, fmt: str) -> str:
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(row.get(c)) for c in columns])
    elif fmt == "json":
        for row in rows:
            buf.write(json.dumps({c: _json_value(row.get(c)) for c in columns}) + "\n")
    else:
        raise UsageError(f"unknown format {fmt!r}")
    return buf.getvalue()


def describe(kind: str, per_trial: bool = False) -> str:
    """Column documentation for ``--describe``."""
    if per_trial:
        cols = TRIAL_COLUMNS.get(kind, [])
        docs = TRIAL_DOCS
    else:
        cols = [c for c in SUMMARY_DOCS]
        docs = SUMMARY_DOCS
    width = max((len(c) for c in cols), default=0)
    return "".join(f"{c.ljust(width)}  {docs.get(c, '')}\n" for c in cols)
