"""Closed-form threshold and diameter-bound evaluators.

Natural logarithms throughout.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .errors import UsageError
from .lp_geometry import (PLike, alpha, as_exponent, lp_ball_volume,
                          unit_ball_lp_diameter)


def default_gamma(n: float) -> float:
    """Slowly divergent default ``gamma(n) = max(1, ln ln ln n)``."""
    if n <= math.e:
        return 1.0
    lln = math.log(math.log(n))
    return max(1.0, math.log(lln)) if lln > 0 else 1.0


def _need_d2(d, what):
    if int(d) != d or d < 1:
        raise UsageError(f"dimension must be a positive integer, got {d!r}")
    if d < 2:
        raise UsageError(f"{what} needs d >= 2 (use lambda_d1 for d = 1)")


def lambda_isolated_threshold(d: int, p: PLike, n: float, gamma: float) -> float:
    """Radius above which isolated vertices a.a. disappear (d >= 2)."""
    _need_d2(d, "the isolated-vertex threshold")
    if n < 3:
        raise UsageError("n must be >= 3")
    if gamma < 0:
        raise UsageError("gamma must be nonnegative")
    ln = math.log(n)
    inner = 2.0 * (d - 1) / d * ln + 2.0 / d * math.log(ln) + gamma
    return (inner / (alpha(d, p) * n)) ** (1.0 / d)


def connectivity_threshold_constant(d: int, p: PLike) -> float:
    """``c* = 2(d-1)/(d alpha)``: connectivity flips at ``lam = (c ln n/n)^(1/d)``."""
    _need_d2(d, "the connectivity constant")
    return 2.0 * (d - 1) / (d * alpha(d, p))


def lambda_from_c(n: float, d: int, c: float) -> float:
    """``(c ln n / n)^(1/d)``."""
    if c < 0:
        raise UsageError("c must be nonnegative")
    return (c * math.log(n) / n) ** (1.0 / d)


def lambda_d1(n: float, c: float, which: str) -> float:
    """d = 1 radii: ``(ln n + c)/n`` for isolated vertices, twice that for connectivity."""
    if n < 3:
        raise UsageError("n must be >= 3")
    base = (math.log(n) + c) / n
    if which == "isolated":
        return base
    if which == "connect":
        return 2.0 * base
    raise UsageError(f"which must be 'isolated' or 'connect', got {which!r}")


def cap_height_schedule(n: float, d: int) -> float:
    """A cap height with ``h^((d+1)/2) n -> inf`` and ``h / lam -> 0``.

    ``(ln n / n)^(2/(d+1))`` for d >= 2, so that ``h^((d+1)/2) n = ln n``;
    ``sqrt(ln n) / n`` for d = 1.
    """
    if n < 3:
        raise UsageError("n must be >= 3")
    if d == 1:
        return math.sqrt(math.log(n)) / n
    return (math.log(n) / n) ** (2.0 / (d + 1))


def diameter_lower_bound(d: int, p: PLike, lam: float, h: float) -> float:
    """``(1-h) diam_p(B) / lam`` hops."""
    if not 0.0 <= h < 1.0:
        raise UsageError(f"h must lie in [0, 1), got {h}")
    if not lam > 0:
        raise UsageError("lambda must be positive")
    return (1.0 - h) * unit_ball_lp_diameter(d, p) / lam


def k0_bound(d: int, p: PLike) -> float:
    """``sqrt(d) + d alpha vol(B) (4d)^d / (4 sqrt(d) (d-1))``."""
    _need_d2(d, "k0")
    vol_b = lp_ball_volume(d, 2, 1.0)
    return math.sqrt(d) + d * alpha(d, p) * vol_b * (4 * d) ** d / (4 * math.sqrt(d) * (d - 1))


def default_K(d: int, p: PLike) -> float:
    """Default constant of the absolute hop bound: ``2 k0 sqrt(d)``."""
    return 2.0 * k0_bound(d, p) * math.sqrt(d)


def rho_schedule(n: float, d: int, p: PLike) -> float:
    """``rho(n)``: ``2 (ln ln n / ln n)^(1/d)``, times ``d^(1/p-1/2)`` when p <= 2."""
    p = as_exponent(p)
    if n < 16:
        raise UsageError("rho(n) needs n >= 16")
    ln = math.log(n)
    base = 2.0 * (math.log(ln) / ln) ** (1.0 / d)
    if p.value <= 2.0:
        base *= d ** (p.inverse - 0.5)
    return base


def absolute_upper_bound(d: int, p: PLike, lam: float, K: float | None = None) -> float:
    """``K diam_2(B) / lam`` with ``K`` defaulting to :func:`default_K`."""
    if K is None:
        K = default_K(d, p)
    return K * 2.0 / lam


def tight_upper_bound(d: int, p: PLike, lam: float, n: float, c_margin: float = 1.0) -> float:
    """``diam_p(B) (1 + C rho(n)) / lam`` hops with configurable big-O constant C."""
    if n < 16:
        raise UsageError("the tight bound needs n >= 16")
    if not lam > 0:
        raise UsageError("lambda must be positive")
    return unit_ball_lp_diameter(d, p) * (1.0 + c_margin * rho_schedule(n, d, p)) / lam


@dataclass(frozen=True)
class ThresholdReport:
    d: int
    p: str
    n: int
    gamma: float
    lambda_isolated: float | None
    lambda_connect_d1: float | None
    lambda_isolated_d1: float | None
    c_star: float | None
    alpha: float

    def as_dict(self) -> dict:
        return asdict(self)


def threshold_report(d: int, p: PLike, n: int, gamma: float | None = None) -> ThresholdReport:
    p = as_exponent(p)
    g = default_gamma(n) if gamma is None else float(gamma)
    if d == 1:
        return ThresholdReport(d, str(p), n, g, None, lambda_d1(n, g, "connect"),
                               lambda_d1(n, g, "isolated"), None, alpha(d, p))
    return ThresholdReport(d, str(p), n, g, lambda_isolated_threshold(d, p, n, g),
                           None, None, connectivity_threshold_constant(d, p), alpha(d, p))


@dataclass(frozen=True)
class DiameterBounds:
    lower_hops: float
    absolute_upper_hops: float
    tight_upper_hops: float
    h: float
    rho: float
    K: float


def diameter_bounds(d: int, p: PLike, lam: float, n: int, c_margin: float = 1.0,
                    K: float | None = None) -> DiameterBounds:
    h = cap_height_schedule(n, d)
    if K is None:
        K = default_K(d, p) if d >= 2 else 2.0
    return DiameterBounds(
        lower_hops=diameter_lower_bound(d, p, lam, h),
        absolute_upper_hops=absolute_upper_bound(d, p, lam, K),
        tight_upper_hops=tight_upper_bound(d, p, lam, n, c_margin),
        h=h, rho=rho_schedule(n, d, p), K=K)
