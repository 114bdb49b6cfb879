"""Compiled breadth-first-search kernels over CSR adjacency."""
import numpy as np
from numba import njit

UNREACHED = -1


@njit(cache=True, nogil=True)
def bfs_fill(indptr, indices, src, dist, queue):
    """Hop distances from ``src`` into ``dist`` (-1 = unreached).

    Returns ``(eccentricity within the component, number reached)``.
    ``dist`` must be all -1 on entry.
    """
    dist[src] = 0
    queue[0] = src
    head = 0
    tail = 1
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u] + 1
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            if dist[v] < 0:
                dist[v] = du
                queue[tail] = v
                tail += 1
    return dist[queue[tail - 1]], tail


@njit(cache=True, nogil=True)
def eccentricities(indptr, indices, sources):
    """Eccentricity of each source (within its component)."""
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    out = np.empty(sources.shape[0], dtype=np.int64)
    for s in range(sources.shape[0]):
        ecc, reached = bfs_fill(indptr, indices, sources[s], dist, queue)
        out[s] = ecc
        for k in range(reached):
            dist[queue[k]] = -1
    return out


@njit(cache=True, nogil=True)
def eccentricities_bounded(indptr, indices, sources, lb, ecc_lo, ecc_hi):
    """Eccentricities with pruning against a running lower bound.

    Sources whose upper bound ``ecc_hi`` is already ``<= lb`` are skipped.
    Every completed BFS tightens per-vertex bounds for all vertices:
    ``max(d(s,v), ecc(s) - d(s,v)) <= ecc(v) <= d(s,v) + ecc(s)``.
    Returns the largest eccentricity found (or ``lb``) and the BFS count.
    """
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    best = lb
    runs = 0
    for s in range(sources.shape[0]):
        x = sources[s]
        if ecc_hi[x] <= best:
            continue
        ecc, reached = bfs_fill(indptr, indices, x, dist, queue)
        runs += 1
        if ecc > best:
            best = ecc
        for k in range(reached):
            v = queue[k]
            dv = dist[v]
            lo = dv if dv > ecc - dv else ecc - dv
            if lo > ecc_lo[v]:
                ecc_lo[v] = lo
            hi = dv + ecc
            if hi < ecc_hi[v]:
                ecc_hi[v] = hi
            dist[v] = -1
    return best, runs


@njit(cache=True, nogil=True)
def bfs_path(indptr, indices, src, dst, max_depth, allowed):
    """Shortest path from ``src`` to ``dst`` using only ``allowed`` vertices.

    Gives up beyond ``max_depth`` hops (negative = unbounded).  Returns the
    vertex sequence, or an empty array when no such path exists.
    """
    n = indptr.shape[0] - 1
    if src == dst:
        out = np.empty(1, dtype=np.int64)
        out[0] = src
        return out
    pred = np.full(n, -1, dtype=np.int64)
    depth = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    depth[src] = 0
    queue[0] = src
    head = 0
    tail = 1
    found = False
    while head < tail and not found:
        u = queue[head]
        head += 1
        if max_depth >= 0 and depth[u] >= max_depth:
            continue
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            if depth[v] < 0 and allowed[v]:
                depth[v] = depth[u] + 1
                pred[v] = u
                if v == dst:
                    found = True
                    break
                queue[tail] = v
                tail += 1
    if not found:
        return np.empty(0, dtype=np.int64)
    length = depth[dst] + 1
    out = np.empty(length, dtype=np.int64)
    v = dst
    for k in range(length - 1, -1, -1):
        out[k] = v
        v = pred[v]
    return out
