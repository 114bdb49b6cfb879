import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rgg_lab import experiments as ex
from rgg_lab.errors import ResourceError, UsageError
from rgg_lab.lp_geometry import as_exponent, lp_norm_columns
from rgg_lab.sampler import Seed, sample_unit_ball
from rgg_lab.thresholds import lambda_d1, lambda_from_c, lambda_isolated_threshold


def cfg(**kw):
    base = dict(kind="connectivity", d=2, p=2, n_list=(500,), trials=3, master_seed=7)
    base.update(kw)
    return ex.ExperimentConfig(**base)


@pytest.mark.parametrize("kw", [
    dict(kind="nope"), dict(trials=0), dict(n_list=()), dict(threads=0), dict(fmt="xml"),
    dict(kind="isolated", c_list=(2.0,)), dict(kind="isolated", d=3, c_list=(0.5,)),
    dict(kind="isolated"), dict(kind="d1law"), dict(kind="hitting", d=1),
    dict(gamma_mode="sometimes"), dict(lam=-0.1), dict(kind="routing", sigma=2),
])
def test_invalid_configs(kw):
    with pytest.raises(UsageError):
        cfg(**kw)


def test_lambda_precedence():
    n = 1000
    spec = ex.lambda_specs(cfg(lam=0.2, c_list=(3.0,)), n)
    assert [(s.lam, s.label) for s in spec] == [(0.2, "explicit")]
    spec = ex.lambda_specs(cfg(c_list=(1.0, 3.0)), n)
    assert [s.lam for s in spec] == [lambda_from_c(n, 2, 1.0), lambda_from_c(n, 2, 3.0)]
    spec = ex.lambda_specs(cfg(gamma_mode="const:2.5"), n)
    assert spec[0].lam == lambda_isolated_threshold(2, 2, n, 2.5) and spec[0].gamma == 2.5
    spec = ex.lambda_specs(cfg(d=1, c_list=(0.0,)), n)
    assert spec[0].lam == lambda_d1(n, 0.0, "connect")


def test_rerun_identical_and_rows_complete():
    c = cfg(c_list=(0.5, 2.0), trials=2, per_trial=True)
    a, b = ex.run_experiment(c), ex.run_experiment(c)
    cols, rows = a.table()
    assert ex.format_table(cols, rows, "csv") == ex.format_table(*b.table(), "csv")
    assert len(rows) == 4
    assert [r["trial"] for r in rows] == [0, 0, 1, 1]
    assert all(r["lam"] is not None and r["lambda_spec"] for r in rows)


def test_parallel_matches_serial():
    c = cfg(c_list=(1.0,), n_list=(300, 600), trials=4)
    serial = ex.format_table(*ex.run_experiment(c).table(per_trial=True), "json")
    par = ex.run_experiment(ex.ExperimentConfig(**{**c.__dict__, "threads": 3}))
    assert ex.format_table(*par.table(per_trial=True), "json") == serial


def test_connectivity_extremes():
    res = ex.run_experiment(cfg(c_list=(0.05, 6.0), n_list=(2000,), trials=3))
    low, high = res.summary
    assert low["frac_connected"] == 0.0 and low["mean_isolated"] > 0
    assert high["frac_connected"] == 1.0 and high["mean_components"] == 1.0


def test_connectivity_d1_matches_graph_path():
    res = ex.run_experiment(cfg(d=1, n_list=(400,), c_list=(1.0,), trials=3, per_trial=True))
    from rgg_lab import analysis
    from rgg_lab.graph_core import build_graph
    from rgg_lab.sampler import PointSet, sample_d1
    for row in res.trials:
        x = sample_d1(400, Seed(7, row.trial))
        g = build_graph(PointSet(x[:, None]), 2, row.lam)
        assert row.component_count == analysis.connected_components(g).count
        assert row.isolated_count == analysis.count_isolated(g)


def test_isolated_counts():
    res = ex.run_experiment(cfg(kind="isolated", c_list=(0.0, 0.2, 0.6), n_list=(3000,), trials=4))
    means = [row["mean_isolated"] for row in res.summary]
    assert means[0] == 3000
    assert means[0] > means[1] > means[2]
    assert res.summary[2]["predicted_isolated"] == pytest.approx(3000 ** 0.4)


def test_d1_law_shape():
    res = ex.run_experiment(cfg(kind="d1law", d=1, n_list=(2000,), trials=30,
                                c_list=(-1.0, 1.0, 4.0)))
    pc = [row["p_connected"] for row in res.summary]
    assert pc[0] <= pc[2]
    assert res.summary[1]["limit"] == pytest.approx(math.exp(-math.exp(-1.0)))
    assert res.summary[1]["se_connected"] is not None


def test_hitting_rows():
    res = ex.run_experiment(cfg(kind="hitting", n_list=(800,), trials=5, per_trial=True))
    for row in res.trials:
        assert row.rho_connect >= row.rho_mindeg1
    assert res.summary[0]["frac_ordered"] == 1.0
    assert res.summary[0]["norm_limit"] == 1.0


def test_diameter_rows_and_undefined():
    res = ex.run_experiment(cfg(kind="diameter", n_list=(1000,), c_list=(0.1, 4.0), trials=2,
                                per_trial=True))
    low = [r for r in res.trials if r.c == 0.1]
    assert all(r.diameter is ex.UNDEFINED for r in low)
    text = ex.format_table(*res.table(), "csv")
    assert "UNDEFINED" in text
    high = [r for r in res.trials if r.c == 4.0 and r.connected]
    for r in high:
        assert r.norm_ratio >= 0.9 * (1 - r.h)
        assert r.h and r.rho and r.tight_bound > r.lower_bound


def test_routing_non_asymptotic():
    with pytest.raises(UsageError):
        ex.run_experiment(cfg(kind="routing", n_list=(1000,), c_list=(4.0,), trials=1))
    lam = lambda_from_c(1000, 2, 6.0)
    res = ex.run_experiment(cfg(kind="routing", n_list=(1000,), c_list=(6.0,), trials=2,
                                sigma=2, r=0.5 * lam, pairs=10, per_trial=True))
    for row in res.trials:
        assert row.non_asymptotic
        if row.connected:
            assert row.route_pairs == 11
            assert row.route_invalid == 0 and row.route_below_bfs == 0


@given(st.integers(2, 300), st.integers(1, 3), st.sampled_from([1, 2, math.inf]),
       st.integers(0, 2 ** 32))
@settings(max_examples=30)
def test_extremal_pair_is_farthest(n, d, p, s):
    pts = sample_unit_ball(n, d, Seed(s))
    u, v = ex.extremal_pair(pts, p)
    q = as_exponent(p)
    i, j = np.triu_indices(n, 1)
    best = lp_norm_columns(pts.columns[:, i] - pts.columns[:, j], q).max()
    got = lp_norm_columns(pts.columns[:, [u]] - pts.columns[:, [v]], q)[0]
    assert got == pytest.approx(best, rel=1e-12)


def test_pair_sampling_distinct():
    rng = np.random.default_rng(0)
    pairs = ex._sample_pairs(rng, 5, 100)
    assert len(pairs) == 10 and len(set(map(frozenset, pairs))) == 10


def test_guardrail():
    c = cfg(n_list=(10 ** 7,), c_list=(50.0,), threads=8)
    with pytest.raises(ResourceError):
        ex.run_trials(c)
    assert ex.estimate_memory_bytes(cfg()) < 2 ** 30


def test_formatting():
    rows = [{"a": 0.1, "b": True, "c": None, "d": ex.UNDEFINED, "e": 3}]
    csv_text = ex.format_table(["a", "b", "c", "d", "e"], rows, "csv")
    assert csv_text == "a,b,c,d,e\n0.1,true,,UNDEFINED,3\n"
    line = json.loads(ex.format_table(["a", "b", "c", "d", "e"], rows, "json"))
    assert line == {"a": 0.1, "b": True, "c": None, "d": "UNDEFINED", "e": 3}
    assert "frac_connected" in ex.describe("connectivity")
    assert ex.describe("routing", per_trial=True).startswith("kind")


def test_timing_column_only_on_request():
    cols, _ = ex.run_experiment(cfg(per_trial=True, trials=1)).table()
    assert "wall_time" not in cols
    cols, rows = ex.run_experiment(cfg(per_trial=True, trials=1, timing=True)).table()
    assert "wall_time" in cols and rows[0]["wall_time"] > 0
