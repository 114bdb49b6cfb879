"""Closed-form l_p and spherical geometry of the Euclidean unit ball.

All formulas are evaluated in double precision.  ``p = inf`` is carried as
an explicit variant of :class:`LpExponent`; gamma-based formulas take the
analytic limit for it rather than plugging in a large finite exponent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import UsageError


@dataclass(frozen=True)
class LpExponent:
    """A metric exponent: finite ``p >= 1`` or infinity.

    Use :meth:`infinity` (or ``LpExponent.parse("inf")``) for the max-norm.
    """

    value: float

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v) or v < 1.0:
            raise UsageError(f"l_p exponent must be >= 1 or inf, got {self.value!r}")
        object.__setattr__(self, "value", v)

    @classmethod
    def infinity(cls) -> "LpExponent":
        return cls(math.inf)

    @classmethod
    def parse(cls, text) -> "LpExponent":
        if isinstance(text, LpExponent):
            return text
        if isinstance(text, str) and text.strip().lower() in ("inf", "infinity", "oo"):
            return cls.infinity()
        try:
            return cls(float(text))
        except (TypeError, ValueError):
            raise UsageError(f"cannot parse l_p exponent from {text!r}") from None

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    @property
    def inverse(self) -> float:
        """``1/p``, exactly 0 for the infinite variant."""
        return 0.0 if self.is_infinite else 1.0 / self.value

    def __str__(self):
        if self.is_infinite:
            return "inf"
        v = self.value
        return str(int(v)) if v.is_integer() else repr(v)


INFINITY = LpExponent.infinity()

PLike = Union[LpExponent, float, int, str]


def as_exponent(p: PLike) -> LpExponent:
    return p if isinstance(p, LpExponent) else LpExponent.parse(p)


@dataclass(frozen=True)
class GeometryParams:
    d: int
    p: LpExponent

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise UsageError(f"dimension must be a positive integer, got {self.d!r}")
        object.__setattr__(self, "p", as_exponent(self.p))


@dataclass(frozen=True)
class CapSpec:
    """Spherical cap of height ``h`` on a Euclidean ball of radius ``r``."""

    r: float
    h: float

    def __post_init__(self):
        if not self.r > 0:
            raise UsageError(f"cap ball radius must be positive, got {self.r}")
        if not 0.0 <= self.h <= self.r:
            raise UsageError(f"cap height must lie in [0, r], got h={self.h}, r={self.r}")


def _check_dim(d):
    if int(d) != d or d < 1:
        raise UsageError(f"dimension must be a positive integer, got {d!r}")
    return int(d)


# -- norms -------------------------------------------------------------------

def lp_norm_columns(diff: np.ndarray, p: LpExponent) -> np.ndarray:
    """l_p norm of every column of a ``(d, m)`` array.

    This is the single distance kernel of the package: graph construction,
    oracles and occupancy scans all go through it, so boundary ties are
    decided identically everywhere.  Coordinates are accumulated in index
    order.
    """
    a = np.abs(np.asarray(diff, dtype=np.float64))
    if a.ndim == 1:
        a = a[:, None]
    d = a.shape[0]
    if d == 0:
        return np.zeros(a.shape[1])
    if p.is_infinite:
        acc = a[0].copy()
        for k in range(1, d):
            np.maximum(acc, a[k], out=acc)
        return acc
    q = p.value
    if q == 1.0:
        acc = a[0].copy()
        for k in range(1, d):
            acc += a[k]
        return acc
    if q == 2.0:
        acc = a[0] * a[0]
        for k in range(1, d):
            acc += a[k] * a[k]
        return np.sqrt(acc)
    acc = a[0] ** q
    for k in range(1, d):
        acc += a[k] ** q
    return acc ** (1.0 / q)


def lp_distance(x, y, p: PLike) -> float:
    """``||x - y||_p`` for two points of equal dimension."""
    p = as_exponent(p)
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    if x.shape != y.shape or x.ndim != 1 or x.size == 0:
        raise UsageError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return float(lp_norm_columns((x - y)[:, None], p)[0])


# -- volumes -----------------------------------------------------------------

def lp_ball_volume(d: int, p: PLike, r: float = 1.0) -> float:
    """Volume of the d-dimensional l_p ball of radius r."""
    d = _check_dim(d)
    p = as_exponent(p)
    if r < 0:
        raise UsageError(f"radius must be nonnegative, got {r}")
    if p.is_infinite:
        return (2.0 * r) ** d
    q = p.value
    log_v = d * math.lgamma((q + 1.0) / q) - math.lgamma((q + d) / q)
    return (2.0 * r) ** d * math.exp(log_v)


def alpha(d: int, p: PLike) -> float:
    """Volume ratio of the l_p ball to the Euclidean ball of the same radius."""
    d = _check_dim(d)
    p = as_exponent(p)
    if p.value == 2.0:
        return 1.0
    log_num = math.lgamma((2.0 + d) / 2.0) - d * math.lgamma(1.5)
    if p.is_infinite:
        return math.exp(log_num)
    q = p.value
    return math.exp(d * math.lgamma((q + 1.0) / q) - math.lgamma((q + d) / q) + log_num)


def unit_ball_lp_diameter(d: int, p: PLike) -> float:
    """l_p diameter of the Euclidean unit ball: ``max(2, 2 d^(1/p - 1/2))``."""
    d = _check_dim(d)
    p = as_exponent(p)
    if p.value >= 2.0:
        return 2.0
    return 2.0 * d ** (p.inverse - 0.5)


def lp_antipodes(d: int, p: PLike) -> tuple[np.ndarray, np.ndarray]:
    """A canonical pair ``(x, -x)`` of l_p-antipodes on the unit sphere.

    For ``p < 2`` this is the all-``d^(-1/2)`` diagonal, otherwise the first
    coordinate unit vector.  At ``p = 2`` every Euclidean antipodal pair
    qualifies; the unit vector is just a representative.
    """
    d = _check_dim(d)
    p = as_exponent(p)
    if p.value < 2.0:
        x = np.full(d, d ** -0.5)
    else:
        x = np.zeros(d)
        x[0] = 1.0
    return x, -x


# -- spherical caps ----------------------------------------------------------

def cap_cone_volume(d: int, cap: CapSpec) -> float:
    """Volume of the hypercone inscribed in a spherical cap.

    Apex at the pole, base the (d-1)-ball of radius ``sqrt(2rh - h^2)``.
    """
    d = _check_dim(d)
    r, h = cap.r, cap.h
    if h == 0.0:
        return 0.0
    return (math.pi ** ((d - 1) / 2.0) * (2.0 * r - h) ** ((d - 1) / 2.0)
            * h ** ((d + 1) / 2.0) / (d * math.gamma((d + 1) / 2.0)))


def cap_relative_volume_lower_bound(d: int, r: float, h: float) -> float:
    """Lower bound on vol(cap) / vol(ball), using ``2r - h >= r``."""
    d = _check_dim(d)
    CapSpec(r, h)
    if h == 0.0:
        return 0.0
    cone = (math.pi ** ((d - 1) / 2.0) * r ** ((d - 1) / 2.0)
            * h ** ((d + 1) / 2.0) / (d * math.gamma((d + 1) / 2.0)))
    return cone / lp_ball_volume(d, 2, r)


def cap_pair_lp_distance(d: int, p: PLike, r: float, h: float) -> float:
    """l_p distance between the opposite caps of height h centred at l_p-antipodes."""
    d = _check_dim(d)
    p = as_exponent(p)
    CapSpec(r, h)
    scale = d ** (p.inverse - 0.5) if p.value <= 2.0 else 1.0
    return 2.0 * (r - h) * scale


# -- petals ------------------------------------------------------------------

def _petal_scale(d: int, p: LpExponent) -> float:
    # ratio diam_p(B)/diam_2(B) inverted: shrink factor for p <= 2
    return d ** (0.5 - p.inverse) if p.value <= 2.0 else 1.0


def petal_inscribed_radius(d: int, p: PLike, lam: float, r: float) -> float:
    """Radius of the Euclidean ball at a petal midpoint inside both l_p balls.

    The two l_p balls have radius ``lam/2`` and centres ``r`` apart
    (Euclidean).  ``r`` must keep the radius nonnegative.
    """
    d = _check_dim(d)
    p = as_exponent(p)
    if not lam > 0:
        raise UsageError(f"lambda must be positive, got {lam}")
    r_max = lam * _petal_scale(d, p)
    if not 0.0 <= r <= r_max:
        raise UsageError(f"centre spacing r={r} outside [0, {r_max}]")
    return max(0.0, 0.5 * r_max - 0.5 * r)


def xi_lower_bound(d: int, p: PLike, lam: float, r: float) -> float:
    """Lower bound on (minimum petal volume) / vol(B)."""
    return petal_inscribed_radius(d, p, lam, r) ** _check_dim(d)
