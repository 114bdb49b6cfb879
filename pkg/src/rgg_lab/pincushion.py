"""Pins, pincushions and petals: highways of overlapping l_p balls along
diameters of the unit ball, and a router that walks along them."""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import RegimeError, UsageError
from .graph_core import CellGrid, RggGraph, _expand_blocks
from .lp_geometry import LpExponent, PLike, as_exponent, lp_norm_columns
from .sampler import PointSet
from .thresholds import default_K, rho_schedule

EMPTY = -1


def pin_direction(d: int, theta: float, phi=()) -> np.ndarray:
    """Unit vector from spherical angles ``theta`` and ``phi = (phi_3..phi_d)``."""
    if d < 2:
        raise UsageError("pins need d >= 2")
    phi = tuple(phi)
    if len(phi) != d - 2:
        raise UsageError(f"need {d - 2} phi angles for d={d}, got {len(phi)}")
    sines = [math.sin(f) for f in phi]  # sines[k] = sin(phi_{k+3})
    prod_all = math.prod(sines)
    x = np.empty(d)
    x[0] = math.cos(theta) * prod_all
    x[1] = math.sin(theta) * prod_all
    for j in range(3, d + 1):
        x[j - 1] = math.cos(phi[j - 3]) * math.prod(sines[j - 2:])
    return x


def pin_offsets(r: float) -> np.ndarray:
    """Scalar positions ``r/2 + r m`` of the centers inside [-1, 1], ascending."""
    if not r > 0:
        raise UsageError(f"spacing r must be positive, got {r}")
    m_lo = math.ceil((-1.0 - r / 2.0) / r)
    m_hi = math.floor((1.0 - r / 2.0) / r)
    m = np.arange(m_lo, m_hi + 1)
    off = r / 2.0 + r * m
    # guard the floor/ceil against rounding at the boundary
    return off[np.abs(off) <= 1.0]


def pin_centers(d: int, theta: float, phi, r: float) -> np.ndarray:
    """Centers ``u_m`` of one pin as a ``(d, k)`` array ordered by m."""
    return np.outer(pin_direction(d, theta, phi), pin_offsets(r))


@dataclass(frozen=True, eq=False)
class Pin:
    theta: float
    phi: tuple
    r: float
    lam: float
    direction: np.ndarray
    offsets: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return np.outer(self.direction, self.offsets)

    @property
    def n_petals(self) -> int:
        return max(len(self.offsets) - 1, 0)

    def petal_midpoints(self) -> np.ndarray:
        """Scalar position along the pin of each petal's midpoint."""
        return 0.5 * (self.offsets[:-1] + self.offsets[1:])


@dataclass(frozen=True, eq=False)
class Pincushion:
    d: int
    p: LpExponent
    sigma: int
    r: float
    lam: float
    pins: list = field(repr=False)

    @property
    def max_petals(self) -> int:
        return max((pin.n_petals for pin in self.pins), default=0)

    def to_json(self) -> str:
        return json.dumps({
            "d": self.d, "p": str(self.p), "sigma": self.sigma,
            "r": self.r, "lambda": self.lam,
            "pins": [{"theta": pin.theta, "phi": list(pin.phi),
                      "centers": len(pin.offsets)} for pin in self.pins],
        }, indent=1)


def angle_grid(sigma: int) -> list[float]:
    return [k * math.pi / (2 * sigma) for k in range(2 * sigma)]


def build_pincushion(d: int, p: PLike, sigma: int, r: float, lam: float) -> Pincushion:
    """All ``(2 sigma)^(d-1)`` pins, lexicographic in the angle indices."""
    p = as_exponent(p)
    if d < 2:
        raise UsageError("a pincushion needs d >= 2")
    if int(sigma) != sigma or sigma < 1:
        raise UsageError(f"sigma must be a positive integer, got {sigma!r}")
    if not (r > 0 and lam > 0):
        raise UsageError("r and lambda must be positive")
    r_max = lam * (d ** (0.5 - p.inverse) if p.value <= 2.0 else 1.0)
    if r > r_max:
        raise UsageError(f"spacing r={r} leaves no room for petals (max {r_max})")
    grid = angle_grid(int(sigma))
    offsets = pin_offsets(r)
    pins = []
    for combo in itertools.product(grid, repeat=d - 1):
        theta, phi = combo[0], tuple(combo[1:])
        pins.append(Pin(theta, phi, float(r), float(lam),
                        pin_direction(d, theta, phi), offsets))
    return Pincushion(d, p, int(sigma), float(r), float(lam), pins)


@dataclass(frozen=True)
class PincushionParams:
    sigma: int
    r: float
    rho: float


def default_parameters(n: int, d: int, p: PLike, lam: float) -> PincushionParams:
    """Asymptotic schedule: ``sigma = floor((ln n)^(1/d))``, ``r = lam s (1 - rho)``."""
    p = as_exponent(p)
    if n < 16:
        raise UsageError("default pincushion parameters need n >= 16")
    sigma = math.floor(math.log(n) ** (1.0 / d))
    rho = rho_schedule(n, d, p)
    if rho >= 1.0:
        raise RegimeError(f"rho(n)={rho:.4f} >= 1 at n={n}: n is too small for the "
                          "asymptotic schedule; pass sigma and r explicitly or raise n")
    scale = d ** (0.5 - p.inverse) if p.value <= 2.0 else 1.0
    return PincushionParams(max(sigma, 1), lam * scale * (1.0 - rho), rho)


# -- petal occupancy -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PetalOccupancy:
    """Lowest-index occupant of every petal (``EMPTY`` if none), per pin."""

    occupants: list
    tau_per_pin: np.ndarray
    tau: int

    @classmethod
    def from_occupants(cls, occupants):
        occupants = [np.asarray(o, dtype=np.int64) for o in occupants]
        per_pin = np.array([int(np.count_nonzero(o == EMPTY)) for o in occupants],
                           dtype=np.int64)
        return cls(occupants, per_pin, int(per_pin.max()) if len(per_pin) else 0)


def _check_consistent(pc: Pincushion, points: PointSet, p):
    if points.d != pc.d:
        raise UsageError(f"points have d={points.d}, pincushion d={pc.d}")
    if p is not None and as_exponent(p) != pc.p:
        raise UsageError(f"metric p={p} does not match pincushion p={pc.p}")


def petal_occupancy(pc: Pincushion, points: PointSet, p: PLike | None = None) -> PetalOccupancy:
    """Grid-accelerated petal scan.

    A point is in a pin ball iff its l_p distance to the center is at most
    ``lam/2``; cells of side ``lam`` guarantee every such point sits in the
    3^d block around the center's cell.
    """
    _check_consistent(pc, points, p)
    n = points.n
    sizes = [len(pin.offsets) for pin in pc.pins]
    if n == 0:
        return PetalOccupancy.from_occupants([np.full(max(s - 1, 0), EMPTY) for s in sizes])
    centers = np.concatenate([pin.centers for pin in pc.pins], axis=1)
    first = np.zeros(len(sizes), dtype=np.int64)
    first[1:] = np.cumsum(sizes)[:-1]
    pin_of = np.repeat(np.arange(len(sizes)), sizes)
    local = np.arange(centers.shape[1]) - first[pin_of]

    radius = pc.lam / 2.0
    grid = CellGrid(points, pc.lam)
    ccells = np.floor((centers + 1.0) / grid.side).astype(np.int64)
    ckey = grid._key(ccells)
    n_c = centers.shape[1]
    member_c, member_pt = [], []
    for off in itertools.product((-1, 0, 1), repeat=pc.d):
        start, count = grid.lookup(ckey + grid.offset_key(off))
        a, b = _expand_blocks(np.arange(n_c), np.ones(n_c, np.int64), start, count)
        if len(a) == 0:
            continue
        pts = grid.order[b]
        dist = lp_norm_columns(points.columns[:, pts] - centers[:, a], pc.p)
        keep = dist <= radius
        member_c.append(a[keep])
        member_pt.append(pts[keep])
    mc = np.concatenate(member_c) if member_c else np.empty(0, np.int64)
    mp = np.concatenate(member_pt) if member_pt else np.empty(0, np.int64)
    keys = mc * n + mp
    # membership of ball c+1 re-keyed onto petal c (same pin only)
    shifted_ok = local[mc] > 0
    shifted = (mc[shifted_ok] - 1) * n + mp[shifted_ok]
    both = np.intersect1d(keys, shifted)
    petal_c = both // n
    uc, idx = np.unique(petal_c, return_index=True)
    occ_global = np.full(n_c, EMPTY, dtype=np.int64)
    occ_global[uc] = (both % n)[idx]
    occupants = [occ_global[first[k]:first[k] + max(sizes[k] - 1, 0)]
                 for k in range(len(sizes))]
    return PetalOccupancy.from_occupants(occupants)


def petal_occupancy_bruteforce(pc: Pincushion, points: PointSet, p: PLike | None = None) -> PetalOccupancy:
    """All-points scan per petal; oracle for :func:`petal_occupancy`."""
    _check_consistent(pc, points, p)
    radius = pc.lam / 2.0
    cols = points.columns
    occupants = []
    for pin in pc.pins:
        centers = pin.centers
        inside = [lp_norm_columns(cols - centers[:, k:k + 1], pc.p) <= radius
                  for k in range(centers.shape[1])]
        occ = []
        for k in range(pin.n_petals):
            hits = np.nonzero(inside[k] & inside[k + 1])[0]
            occ.append(int(hits[0]) if len(hits) else EMPTY)
        occupants.append(occ)
    return PetalOccupancy.from_occupants(occupants)


def tau_bound(sigma: int, r: float, n: int, xi_rel: float, d: int) -> float:
    """``sigma^((d-1)/2) (2/r) exp(-n xi_rel)``, ``xi_rel`` = petal volume / vol(B)."""
    if not (sigma > 0 and r > 0 and n > 0 and xi_rel >= 0):
        raise UsageError("tau_bound needs positive sigma, r, n and nonnegative xi")
    return sigma ** ((d - 1) / 2.0) * (2.0 / r) * math.exp(-n * xi_rel)


# -- routing -------------------------------------------------------------------

@dataclass
class Route:
    """Outcome of :func:`route`; ``path`` is ``None`` on failure."""

    path: list | None
    failure: str | None = None
    join_fallback: bool = False
    bridges: int = 0

    @property
    def ok(self) -> bool:
        return self.path is not None

    @property
    def hops(self) -> int | None:
        return None if self.path is None else len(self.path) - 1


def is_valid_path(graph: RggGraph, path) -> bool:
    for a, b in zip(path[:-1], path[1:]):
        nb = graph.neighbors(a)
        k = np.searchsorted(nb, b)
        if k >= len(nb) or nb[k] != b:
            return False
    return len(path) > 0


def _adjacent(graph: RggGraph, a: int, b: int) -> bool:
    nb = graph.neighbors(a)
    k = np.searchsorted(nb, b)
    return bool(k < len(nb) and nb[k] == b)


class _Router:
    def __init__(self, graph, points, pc, occ, budget):
        self.graph = graph
        self.pc = pc
        self.occ = occ
        self.budget = budget
        self.everywhere = np.ones(graph.n, dtype=np.bool_)
        self.bridges = 0
        pins, petals, verts = [], [], []
        for k, o in enumerate(occ.occupants):
            nz = np.nonzero(o != EMPTY)[0]
            pins.append(np.full(len(nz), k))
            petals.append(nz)
            verts.append(o[nz])
        self.occ_pin = np.concatenate(pins) if pins else np.empty(0, np.int64)
        self.occ_petal = np.concatenate(petals) if petals else np.empty(0, np.int64)
        self.occ_vertex = np.concatenate(verts) if verts else np.empty(0, np.int64)
        self.occ_xyz = points.columns[:, self.occ_vertex]
        self.points = points

    def bridge(self, a, b, allowed=None, depth=None):
        if a == b:
            return [a]
        if allowed is None:
            allowed = self.everywhere
        depth = self.budget if depth is None else depth
        path = _kernels.bfs_path(self.graph.indptr, self.graph.indices, a, b, depth, allowed)
        if len(path) == 0:
            return None
        self.bridges += 1
        return path.tolist()

    def anchor(self, x):
        """Nearest petal occupant (Euclidean); ties by pin order, then petal."""
        diff = self.occ_xyz - self.points.columns[:, x:x + 1]
        k = int(np.argmin(np.sum(diff * diff, axis=0)))
        return int(self.occ_pin[k]), int(self.occ_petal[k])

    def walk_to_center(self, x):
        """Vertex chain from ``x`` to the innermost occupied petal on its side."""
        pin_k, petal = self.anchor(x)
        pin = self.pc.pins[pin_k]
        occ = self.occ.occupants[pin_k]
        mids = pin.petal_midpoints()
        kc = int(np.argmin(np.abs(mids)))
        step = -1 if petal > kc else 1
        chain = [x]
        x1 = int(occ[petal])
        seg = self.bridge(x, x1)
        if seg is None:
            return None, "anchor"
        chain.extend(seg[1:])
        for k in range(petal + step, kc + step, step):
            v = int(occ[k])
            if v == EMPTY or v == chain[-1]:
                continue
            if _adjacent(self.graph, chain[-1], v):
                chain.append(v)
                continue
            seg = self.bridge(chain[-1], v)
            if seg is None:
                return None, "pin"
            chain.extend(seg[1:])
        return chain, None


def route(graph: RggGraph, points: PointSet, pc: Pincushion, occ: PetalOccupancy,
          x: int, y: int, detour_budget: int | None = None) -> Route:
    """Route from ``x`` to ``y`` along the pincushion.

    Each endpoint is bridged to its nearest petal occupant, walks petal to
    petal toward the origin along that pin, and the two inner ends are
    joined near the origin.  Gaps (empty petals, non-adjacent occupants) are
    bridged by BFS detours of at most ``detour_budget`` hops.
    """
    if graph.p != pc.p or graph.lam != pc.lam or points.n != graph.n or points.d != pc.d:
        raise UsageError("graph, points and pincushion parameters disagree")
    for v in (x, y):
        if int(v) != v or not 0 <= v < graph.n:
            raise UsageError(f"vertex {v!r} out of range")
    x, y = int(x), int(y)
    if x == y:
        return Route([x])
    if detour_budget is None:
        K = default_K(pc.d, pc.p)
        detour_budget = math.ceil(K * (occ.tau + 2) * pc.r / pc.lam)
    router = _Router(graph, points, pc, occ, int(detour_budget))
    if len(router.occ_vertex) == 0:
        return Route(None, "no occupied petals")
    left, why = router.walk_to_center(x)
    if left is None:
        return Route(None, why, bridges=router.bridges)
    right, why = router.walk_to_center(y)
    if right is None:
        return Route(None, why, bridges=router.bridges)
    x2, y2 = left[-1], right[-1]
    radius = (2 * occ.tau + 4) * pc.r
    allowed = points.euclidean_norms() <= radius
    allowed[[x2, y2]] = True
    join = router.bridge(x2, y2, allowed, depth=-1)
    fallback = False
    if join is None:
        fallback = True
        join = router.bridge(x2, y2)
        if join is None:
            return Route(None, "join", True, router.bridges)
    path = left + join[1:] + right[::-1][1:]
    return Route(path, None, fallback, router.bridges)
