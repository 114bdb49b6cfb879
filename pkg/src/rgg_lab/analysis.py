"""Graph observables: components, isolated vertices, hop distances, diameter,
and hitting radii for connectivity and minimum degree one."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components as _cc
from scipy.spatial import cKDTree

from . import _kernels
from .errors import UsageError
from .graph_core import RggGraph, grid_edges_within
from .lp_geometry import PLike, as_exponent, lp_norm_columns
from .sampler import PointSet

ALLPAIRS_MAX_N = 2000
PRIM_MAX_N = 30_000


class Undefined(enum.Enum):
    """Diameter of a disconnected graph."""

    UNDEFINED = "UNDEFINED"

    def __str__(self):
        return self.value

    def __bool__(self):
        return False


UNDEFINED = Undefined.UNDEFINED


@dataclass(frozen=True)
class ComponentLabeling:
    labels: np.ndarray
    count: int
    largest: int

    @property
    def connected(self) -> bool:
        return self.count == 1


@dataclass(frozen=True)
class HittingRadii:
    rho_connect: float
    rho_mindeg1: float

    @property
    def simultaneous(self) -> bool:
        return self.rho_connect == self.rho_mindeg1


def connected_components(graph: RggGraph) -> ComponentLabeling:
    if graph.n == 0:
        return ComponentLabeling(np.empty(0, np.int64), 0, 0)
    count, labels = _cc(graph.to_scipy(), directed=False)
    sizes = np.bincount(labels)
    return ComponentLabeling(labels.astype(np.int64), int(count), int(sizes.max()))


def is_connected(graph: RggGraph) -> bool:
    return connected_components(graph).count == 1


def count_isolated(graph: RggGraph) -> int:
    return int(np.count_nonzero(graph.degrees() == 0))


def _check_vertex(graph: RggGraph, v) -> int:
    if int(v) != v or not 0 <= v < graph.n:
        raise UsageError(f"vertex {v!r} out of range for n={graph.n}")
    return int(v)


def _bfs_raw(graph: RggGraph, source: int) -> np.ndarray:
    dist = np.full(graph.n, -1, dtype=np.int64)
    queue = np.empty(graph.n, dtype=np.int64)
    _kernels.bfs_fill(graph.indptr, graph.indices, source, dist, queue)
    return dist


def bfs_distances(graph: RggGraph, source: int) -> np.ndarray:
    """Hop counts from ``source``; unreachable vertices get ``inf``."""
    source = _check_vertex(graph, source)
    raw = _bfs_raw(graph, source)
    out = raw.astype(np.float64)
    out[raw < 0] = math.inf
    return out


def _allpairs_diameter(graph: RggGraph) -> int:
    ecc = _kernels.eccentricities(graph.indptr, graph.indices,
                                  np.arange(graph.n, dtype=np.int64))
    return int(ecc.max())


def _double_sweep(graph: RggGraph) -> tuple[int, int]:
    """Lower bound and a midpoint vertex of a long shortest path.

    Sweeps from the lowest-index vertex of maximum degree to a farthest
    vertex ``a``, then from ``a`` to a farthest ``b``.  Ties always resolve
    to the lowest index.
    """
    deg = graph.degrees()
    r = int(np.argmax(deg))
    dr = _bfs_raw(graph, r)
    a = int(np.argmax(dr))
    da = _bfs_raw(graph, a)
    b = int(np.argmax(da))
    db = _bfs_raw(graph, b)
    length = int(da[b])
    on_path = (da + db == length) & (da == length // 2)
    mid = int(np.argmax(on_path))
    return max(length, int(dr.max()), int(db.max())), mid


def _ifub_diameter(graph: RggGraph) -> int:
    """Exact diameter of a connected graph by fringe-upper-bound search.

    Starting from the double-sweep midpoint ``u``, fringe levels of the BFS
    tree of ``u`` are examined from the outside in; a level's vertices only
    need BFS while their eccentricity could still beat the lower bound.
    """
    n = graph.n
    lb, u = _double_sweep(graph)
    du = _bfs_raw(graph, u)
    i = int(du.max())
    lb = max(lb, i)
    ecc_lo = np.zeros(n, dtype=np.int64)
    ecc_hi = du + i
    by_level = np.argsort(du, kind="stable")
    level_start = np.searchsorted(du[by_level], np.arange(i + 2))
    ub = 2 * i
    while ub > lb:
        fringe = by_level[level_start[i]:level_start[i + 1]]
        best, _ = _kernels.eccentricities_bounded(
            graph.indptr, graph.indices, fringe, lb, ecc_lo, ecc_hi)
        lb = max(lb, int(best), int(ecc_lo.max()))
        if lb > 2 * (i - 1):
            return lb
        ub = 2 * (i - 1)
        i -= 1
    return lb


def exact_diameter(graph: RggGraph, method: str = "auto"):
    """Hop diameter, or :data:`UNDEFINED` if the graph is disconnected.

    ``method`` is ``"ifub"``, ``"allpairs"`` or ``"auto"`` (all-pairs BFS up
    to ``ALLPAIRS_MAX_N`` vertices, iFUB above).
    """
    if method not in ("auto", "ifub", "allpairs"):
        raise UsageError(f"unknown diameter method {method!r}")
    if graph.n == 0 or not is_connected(graph):
        return UNDEFINED
    if graph.n == 1:
        return 0
    if method == "allpairs" or (method == "auto" and graph.n <= ALLPAIRS_MAX_N):
        return _allpairs_diameter(graph)
    return _ifub_diameter(graph)


def d1_is_connected(coords, lam: float) -> bool:
    """Connectivity of the d=1 graph from sorted coordinates: every gap ``<= lam``."""
    x = np.asarray(coords, dtype=np.float64)
    gaps = np.diff(x)
    if np.any(gaps < 0):
        raise UsageError("coordinates must be sorted ascending")
    return bool(np.all(gaps <= lam))


def d1_isolated_count(coords, lam: float) -> int:
    """Isolated vertices of the d=1 graph from sorted coordinates."""
    x = np.asarray(coords, dtype=np.float64)
    n = len(x)
    if n <= 1:
        return n
    gaps = np.diff(x)
    if np.any(gaps < 0):
        raise UsageError("coordinates must be sorted ascending")
    far = gaps > lam
    left = np.concatenate([[True], far])
    right = np.concatenate([far, [True]])
    return int(np.count_nonzero(left & right))


# -- hitting radii -------------------------------------------------------------

def _nn_distances(points: PointSet, p) -> np.ndarray:
    """Nearest-neighbor l_p distance of every point, through the shared kernel."""
    tree = cKDTree(points.coords)
    q = math.inf if p.is_infinite else p.value
    _, idx = tree.query(points.coords, k=2, p=q)
    self_idx = np.arange(points.n)
    # with coincident points the tree may report the other point first
    nn = np.where(idx[:, 0] == self_idx, idx[:, 1], idx[:, 0])
    return lp_norm_columns(points.columns - points.columns[:, nn], p)


def _bottleneck_prim(points: PointSet, p) -> float:
    """Longest edge of an l_p minimum spanning tree, dense O(n^2) Prim."""
    cols = points.columns
    n = points.n
    best = lp_norm_columns(cols - cols[:, :1], p)
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    best[0] = math.inf
    longest = 0.0
    for _ in range(n - 1):
        v = int(np.argmin(best))
        longest = max(longest, float(best[v]))
        in_tree[v] = True
        best[v] = math.inf
        dv = lp_norm_columns(cols - cols[:, v:v + 1], p)
        dv[in_tree] = math.inf
        np.minimum(best, dv, out=best)
    return longest


def _bottleneck_grid(points: PointSet, p, start: float) -> float:
    """Longest MST edge from the sparse graph at a radius that already connects.

    Every MST edge is no longer than the bottleneck, so the MST of any
    connected G(lam0) has the same longest edge.  Among the candidate
    edge weights, the bottleneck is the smallest that connects the graph;
    it is found by bisection over the sorted weights.
    """
    from scipy.sparse import csr_matrix
    n = points.n
    lam0 = start
    while True:
        i, j, w = grid_edges_within(points, p, lam0)
        g = csr_matrix((np.ones(len(i), np.int8), (i, j)), shape=(n, n))
        if _cc(g, directed=False)[0] == 1:
            break
        lam0 *= 1.5
    order = np.argsort(w, kind="stable")
    i, j, w = i[order], j[order], w[order]
    # the smallest connecting weight is at least the largest NN distance
    lo = int(np.searchsorted(w, start, side="left"))
    hi = len(w) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        k = int(np.searchsorted(w, w[mid], side="right"))
        g = csr_matrix((np.ones(k, np.int8), (i[:k], j[:k])), shape=(n, n))
        if _cc(g, directed=False)[0] == 1:
            hi = mid
        else:
            lo = mid + 1
    return float(w[lo])


def hitting_radii(points: PointSet, p: PLike, method: str = "auto") -> HittingRadii:
    """Smallest radii at which the graph becomes connected / has min degree >= 1.

    ``method`` selects the spanning-tree route: ``"prim"`` (dense),
    ``"grid"`` (sparse candidate graph) or ``"auto"`` (Prim up to
    ``PRIM_MAX_N`` points).
    """
    p = as_exponent(p)
    if points.n < 2:
        raise UsageError("hitting radii need at least two points")
    if method not in ("auto", "prim", "grid"):
        raise UsageError(f"unknown method {method!r}")
    nn = _nn_distances(points, p)
    mindeg1 = float(nn.max())
    if method == "prim" or (method == "auto" and points.n <= PRIM_MAX_N):
        connect = _bottleneck_prim(points, p)
    elif mindeg1 == 0.0:
        connect = _bottleneck_prim(points, p)
    else:
        connect = _bottleneck_grid(points, p, mindeg1)
    return HittingRadii(rho_connect=connect, rho_mindeg1=mindeg1)
