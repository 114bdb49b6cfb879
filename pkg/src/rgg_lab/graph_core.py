"""Construction of the unit-ball random geometric graph G_p^d(lambda, n)."""
from __future__ import annotations

import csv
import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import UsageError
from .lp_geometry import LpExponent, PLike, alpha, as_exponent, lp_norm_columns
from .sampler import PointSet

# candidate pairs materialized per batch during grid construction
_PAIR_BATCH = 4_000_000


@dataclass(frozen=True, eq=False)
class RggGraph:
    """Undirected graph in CSR form; neighbor lists sorted ascending."""

    n: int
    lam: float
    p: LpExponent
    indptr: np.ndarray
    indices: np.ndarray

    @property
    def edge_count(self) -> int:
        return int(self.indices.shape[0] // 2)

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def edges(self) -> np.ndarray:
        """``(m, 2)`` array of edges ``u < v`` in lexicographic order."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees())
        keep = rows < self.indices
        return np.column_stack([rows[keep], self.indices[keep]])

    def same_edges(self, other: "RggGraph") -> bool:
        return (self.n == other.n and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    def to_scipy(self):
        from scipy.sparse import csr_matrix
        data = np.ones(self.indices.shape[0], dtype=np.int8)
        return csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def export_edges_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["u", "v"])
            w.writerows(self.edges().tolist())

    def __repr__(self):
        return f"RggGraph(n={self.n}, lam={self.lam!r}, p={self.p}, edges={self.edge_count})"


def graph_from_edges(n: int, i, j, lam: float, p: PLike) -> RggGraph:
    """Assemble a symmetric CSR graph from an undirected edge list."""
    i = np.asarray(i, dtype=np.int64)
    j = np.asarray(j, dtype=np.int64)
    if np.any(i == j):
        raise UsageError("self-loops are not allowed")
    lo, hi = np.minimum(i, j), np.maximum(i, j)
    key = np.unique(lo * max(n, 1) + hi)
    lo, hi = key // max(n, 1), key % max(n, 1)
    rows = np.concatenate([lo, hi])
    cols = np.concatenate([hi, lo])
    order = np.lexsort((cols, rows))
    indices = cols[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return RggGraph(n, float(lam), as_exponent(p), indptr, indices)


class CellGrid:
    """Points bucketed into axis-aligned cells of side ``side``.

    A point ``x`` lives in cell ``floor((x + 1) / side)`` per axis.  Cells
    are keyed by a linear index over a grid padded by one cell on each
    side, so a neighbor offset never wraps.
    """

    def __init__(self, points: PointSet, side: float):
        if not side > 0:
            raise UsageError(f"cell side must be positive, got {side}")
        self.side = float(side)
        self.d = points.d
        cells = np.floor((points.columns + 1.0) / self.side).astype(np.int64)
        self.cells = cells
        lo = cells.min(axis=1) - 1 if points.n else np.zeros(self.d, np.int64)
        hi = cells.max(axis=1) + 1 if points.n else np.zeros(self.d, np.int64)
        self.origin = lo
        self.dims = (hi - lo + 1).astype(np.int64)
        if math.prod(int(v) for v in self.dims) >= 2 ** 62:
            raise UsageError("cell grid too fine for 64-bit cell keys")
        self.strides = np.ones(self.d, dtype=np.int64)
        for k in range(1, self.d):
            self.strides[k] = self.strides[k - 1] * self.dims[k - 1]
        key = self._key(cells)
        self.order = np.argsort(key, kind="stable")
        self.keys, self.starts, self.counts = np.unique(
            key[self.order], return_index=True, return_counts=True)

    def _key(self, cells: np.ndarray) -> np.ndarray:
        return ((cells - self.origin[:, None]) * self.strides[:, None]).sum(axis=0)

    def cell_of(self, x) -> tuple:
        x = np.asarray(x, dtype=np.float64)
        return tuple(int(v) for v in np.floor((x + 1.0) / self.side))

    def offset_key(self, offset) -> int:
        return int(np.dot(np.asarray(offset, dtype=np.int64), self.strides))

    def lookup(self, keys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """``(start, count)`` into ``order`` for each key; count 0 if absent."""
        pos = np.searchsorted(self.keys, keys)
        pos = np.minimum(pos, max(len(self.keys) - 1, 0))
        hit = (self.keys[pos] == keys) if len(self.keys) else np.zeros(len(keys), bool)
        return np.where(hit, self.starts[pos], 0), np.where(hit, self.counts[pos], 0)

    def members(self, cell) -> np.ndarray:
        key = int(np.dot(np.asarray(cell, dtype=np.int64) - self.origin, self.strides))
        start, count = self.lookup(np.array([key]))
        return self.order[start[0]:start[0] + count[0]]


def half_offsets(d: int) -> list[tuple]:
    """Neighbor offsets in ``{-1,0,1}^d`` that are lexicographically positive."""
    out = []
    for off in itertools.product((-1, 0, 1), repeat=d):
        nz = next((v for v in off if v != 0), 0)
        if nz > 0:
            out.append(off)
    return out


def _expand_blocks(start_a, count_a, start_b, count_b):
    """All index pairs between blocks ``[start_a, +count_a)`` and ``[start_b, +count_b)``."""
    tot = count_a * count_b
    total = int(tot.sum())
    if total == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    rep = np.repeat(np.arange(len(tot)), tot)
    t = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(tot) - tot, tot)
    cb = count_b[rep]
    return start_a[rep] + t // cb, start_b[rep] + t % cb


def _batches(count_a, count_b):
    """Split block pairs into slices of bounded total pair count."""
    tot = count_a * count_b
    csum = np.cumsum(tot)
    lo = 0
    while lo < len(tot):
        base = csum[lo - 1] if lo else 0
        hi = int(np.searchsorted(csum, base + _PAIR_BATCH, side="right"))
        hi = max(hi, lo + 1)
        yield slice(lo, hi)
        lo = hi


def grid_candidate_pairs(grid: CellGrid):
    """Yield ``(i, j)`` arrays of point pairs in the same or adjacent cells.

    Each unordered pair is produced exactly once.
    """
    order = grid.order
    # same cell: keep i < j positions inside each block
    for sl in _batches(grid.counts, grid.counts):
        a, b = _expand_blocks(grid.starts[sl], grid.counts[sl], grid.starts[sl], grid.counts[sl])
        keep = a < b
        yield order[a[keep]], order[b[keep]]
    for off in half_offsets(grid.d):
        start_b, count_b = grid.lookup(grid.keys + grid.offset_key(off))
        has = count_b > 0
        sa, ca, sb, cb = grid.starts[has], grid.counts[has], start_b[has], count_b[has]
        for sl in _batches(ca, cb):
            a, b = _expand_blocks(sa[sl], ca[sl], sb[sl], cb[sl])
            yield order[a], order[b]


def _pair_distances(cols: np.ndarray, i: np.ndarray, j: np.ndarray, p: LpExponent):
    return lp_norm_columns(cols[:, i] - cols[:, j], p)


def grid_edges_within(points: PointSet, p: LpExponent, radius: float):
    """All pairs at l_p distance ``<= radius`` with their distances, via the grid."""
    grid = CellGrid(points, radius)
    cols = points.columns
    ii, jj, ww = [], [], []
    for i, j in grid_candidate_pairs(grid):
        w = _pair_distances(cols, i, j, p)
        keep = w <= radius
        ii.append(i[keep])
        jj.append(j[keep])
        ww.append(w[keep])
    if not ii:
        return np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0)
    return np.concatenate(ii), np.concatenate(jj), np.concatenate(ww)


def expected_degree(n: int, d: int, p: PLike, lam: float) -> float:
    """Interior expected degree ``alpha n lam^d`` (ball volume ratio times n)."""
    return alpha(d, p) * n * lam ** d


def build_graph(points: PointSet, p: PLike, lam: float) -> RggGraph:
    """Exact G_p(lam) via a cell grid of side ``lam`` and a 3^d neighborhood scan.

    Correct for every p because ``||x-y||_p <= lam`` implies
    ``||x-y||_inf <= lam``.
    """
    p = as_exponent(p)
    if not lam > 0:
        raise UsageError(f"lambda must be positive, got {lam}")
    n = points.n
    if n > 8 and expected_degree(n, points.d, p, lam) > n / 4:
        warnings.warn(f"expected degree exceeds n/4 at lambda={lam}; the cell grid "
                      "gives no asymptotic benefit", RuntimeWarning, stacklevel=2)
    i, j, _ = grid_edges_within(points, p, lam)
    return graph_from_edges(n, i, j, lam, p)


def build_graph_naive(points: PointSet, p: PLike, lam: float) -> RggGraph:
    """O(n^2) all-pairs construction; testing oracle for :func:`build_graph`."""
    p = as_exponent(p)
    if not lam > 0:
        raise UsageError(f"lambda must be positive, got {lam}")
    n = points.n
    cols = points.columns
    ii, jj = [], []
    for u in range(n - 1):
        dist = lp_norm_columns(cols[:, u + 1:] - cols[:, u:u + 1], p)
        nb = np.nonzero(dist <= lam)[0] + u + 1
        ii.append(np.full(len(nb), u, dtype=np.int64))
        jj.append(nb)
    if not ii:
        return graph_from_edges(n, [], [], lam, p)
    return graph_from_edges(n, np.concatenate(ii), np.concatenate(jj), lam, p)


def degree_sequence(graph: RggGraph) -> list[int]:
    return graph.degrees().tolist()
