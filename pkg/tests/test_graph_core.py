import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rgg_lab.errors import UsageError
from rgg_lab.graph_core import (CellGrid, build_graph, build_graph_naive, degree_sequence,
                                graph_from_edges, half_offsets)
from rgg_lab.lp_geometry import as_exponent, lp_distance, unit_ball_lp_diameter
from rgg_lab.sampler import PointSet, Seed, sample_unit_ball

exponents = st.sampled_from([1, 1.5, 2, 3, math.inf])


def edge_set(g):
    return {tuple(e) for e in g.edges().tolist()}


def test_three_points():
    pts = PointSet([[0, 0], [0.4, 0], [0.8, 0]])
    g = build_graph(pts, 2, 0.5)
    assert edge_set(g) == {(0, 1), (1, 2)}
    assert degree_sequence(g) == [1, 2, 1]


def test_closed_ball_tie():
    pts = PointSet([[0.0, 0.0], [0.25, 0.0]])
    for builder in (build_graph, build_graph_naive):
        assert builder(pts, 2, 0.25).edge_count == 1
        assert builder(pts, 2, np.nextafter(0.25, 0)).edge_count == 0


def test_tie_uses_shared_kernel():
    # distances that are exact in floating point under several metrics
    pts = PointSet([[-0.5, -0.5], [0.25, 0.0], [0.0, 0.5]])
    for p in (1, 2, math.inf):
        for u in range(3):
            for v in range(u + 1, 3):
                lam = lp_distance(pts[u], pts[v], p)
                assert (u, v) in edge_set(build_graph(pts, p, lam))


def test_single_vertex_and_complete():
    assert build_graph_naive(PointSet(np.zeros((1, 2))), 2, 0.1).edge_count == 0
    pts = sample_unit_ball(30, 3, Seed(1))
    for p in (1, 2, math.inf):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            g = build_graph(pts, p, unit_ball_lp_diameter(3, p))
        assert g.edge_count == 30 * 29 // 2


def test_degree_examples():
    g = graph_from_edges(4, [0, 0, 0, 1, 1, 2], [1, 2, 3, 2, 3, 3], 1.0, 2)
    assert degree_sequence(g) == [3, 3, 3, 3]


def test_bad_lambda():
    pts = sample_unit_ball(5, 2, Seed(0))
    for lam in (0.0, -1.0):
        with pytest.raises(UsageError):
            build_graph(pts, 2, lam)
        with pytest.raises(UsageError):
            build_graph_naive(pts, 2, lam)


def test_dense_warning():
    pts = sample_unit_ball(200, 2, Seed(0))
    with pytest.warns(RuntimeWarning):
        build_graph(pts, 2, 1.5)


def test_self_loop_rejected():
    with pytest.raises(UsageError):
        graph_from_edges(3, [0], [0], 1.0, 2)


def test_half_offsets():
    for d in (1, 2, 3, 4):
        offs = half_offsets(d)
        assert len(offs) == (3 ** d - 1) // 2
        assert all(tuple(-v for v in o) not in offs for o in offs)


def test_cell_grid_members():
    pts = PointSet([[0.05, 0.05], [0.06, 0.01], [0.5, 0.5]])
    grid = CellGrid(pts, 0.1)
    assert sorted(grid.members(grid.cell_of(pts[0])).tolist()) == [0, 1]
    assert grid.members((100, 100)).size == 0


@given(st.integers(0, 120), st.integers(1, 4), exponents, st.floats(0.02, 1.0),
       st.integers(0, 2 ** 32))
def test_grid_matches_naive(n, d, p, lam, s):
    pts = sample_unit_ball(n, d, Seed(s))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        assert build_graph(pts, p, lam).same_edges(build_graph_naive(pts, p, lam))


@given(st.integers(2, 150), st.integers(1, 3), exponents, st.floats(0.02, 0.6),
       st.floats(0.0, 0.5), st.integers(0, 2 ** 32))
def test_monotone_in_lambda(n, d, p, lam, extra, s):
    pts = sample_unit_ball(n, d, Seed(s))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        assert edge_set(build_graph(pts, p, lam)) <= edge_set(build_graph(pts, p, lam + extra))


@given(st.integers(2, 150), st.integers(1, 4), st.floats(1, 6), st.floats(0, 6),
       st.floats(0.05, 0.5), st.integers(0, 2 ** 32))
def test_monotone_in_p(n, d, p, dq, lam, s):
    pts = sample_unit_ball(n, d, Seed(s))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        small = edge_set(build_graph(pts, p, lam))
        assert small <= edge_set(build_graph(pts, p + dq, lam))
        assert small <= edge_set(build_graph(pts, math.inf, lam))


@given(st.integers(1, 200), st.integers(1, 4), exponents, st.floats(0.05, 0.5),
       st.integers(0, 2 ** 32))
def test_csr_structure(n, d, p, lam, s):
    pts = sample_unit_ball(n, d, Seed(s))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        g = build_graph(pts, p, lam)
    assert sum(degree_sequence(g)) == 2 * g.edge_count
    adj = g.to_scipy()
    assert (adj != adj.T).nnz == 0
    for u in range(n):
        nb = g.neighbors(u)
        assert np.all(np.diff(nb) > 0)
        assert u not in nb


def test_edges_lexicographic_and_csv(tmp_path):
    pts = sample_unit_ball(300, 2, Seed(4))
    g = build_graph(pts, 1.5, 0.2)
    e = g.edges()
    assert np.all(e[:, 0] < e[:, 1])
    keys = e[:, 0] * g.n + e[:, 1]
    assert np.all(np.diff(keys) > 0)
    path = tmp_path / "edges.csv"
    g.export_edges_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "u,v" and len(lines) == g.edge_count + 1
    assert g.p == as_exponent(1.5)


def test_500_point_oracle():
    pts = sample_unit_ball(500, 3, Seed(2024))
    assert build_graph(pts, 1.5, 0.3).same_edges(build_graph_naive(pts, 1.5, 0.3))
