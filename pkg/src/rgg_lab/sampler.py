"""Reproducible uniform samples from the Euclidean unit ball."""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import UsageError

U64 = 2 ** 64


@dataclass(frozen=True)
class Seed:
    """``(master, stream)`` pair; ``stream`` is usually the trial index."""

    master: int
    stream: int = 0

    def __post_init__(self):
        for name in ("master", "stream"):
            v = getattr(self, name)
            if int(v) != v or not 0 <= v < U64:
                raise UsageError(f"seed {name} must be an unsigned 64-bit integer, got {v!r}")

    def generator(self) -> np.random.Generator:
        # SeedSequence hashes (master, stream) into an independent PCG64 stream
        ss = np.random.SeedSequence(entropy=int(self.master), spawn_key=(int(self.stream),))
        return np.random.Generator(np.random.PCG64(ss))


class PointSet:
    """Immutable set of ``n`` points in R^d, stored coordinate-major.

    ``columns`` has shape ``(d, n)``; ``coords`` is the ``(n, d)`` view.
    """

    __slots__ = ("_cols",)

    def __init__(self, coords=None, *, columns=None):
        if columns is None:
            arr = np.asarray(coords, dtype=np.float64)
            if arr.ndim != 2:
                raise UsageError("coords must be an (n, d) array")
            cols = np.ascontiguousarray(arr.T)
        else:
            cols = np.ascontiguousarray(np.asarray(columns, dtype=np.float64))
            if cols.ndim != 2:
                raise UsageError("columns must be a (d, n) array")
        if cols.shape[0] < 1:
            raise UsageError("dimension must be >= 1")
        cols.setflags(write=False)
        self._cols = cols

    @property
    def d(self) -> int:
        return self._cols.shape[0]

    @property
    def n(self) -> int:
        return self._cols.shape[1]

    @property
    def columns(self) -> np.ndarray:
        return self._cols

    @property
    def coords(self) -> np.ndarray:
        return self._cols.T

    def __len__(self):
        return self.n

    def __getitem__(self, i) -> np.ndarray:
        return self._cols[:, i]

    def __iter__(self):
        return iter(self.coords)

    def __eq__(self, other):
        return isinstance(other, PointSet) and np.array_equal(self._cols, other._cols)

    def __repr__(self):
        return f"PointSet(n={self.n}, d={self.d})"

    def euclidean_norms(self) -> np.ndarray:
        return np.sqrt(np.sum(self._cols ** 2, axis=0))

    # -- CSV ---------------------------------------------------------------

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"x{k + 1}" for k in range(self.d)])
            for row in self.coords:
                w.writerow([repr(float(v)) for v in row])

    @classmethod
    def from_csv(cls, path) -> "PointSet":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows:
            raise UsageError(f"{path}: empty point file")
        header = rows[0]
        if header != [f"x{k + 1}" for k in range(len(header))] or not header:
            raise UsageError(f"{path}: bad header {header!r}")
        d = len(header)
        data = np.array([[float(v) for v in row] for row in rows[1:]],
                        dtype=np.float64).reshape(-1, d)
        return cls(data)


def sample_unit_ball(n: int, d: int, seed: Seed) -> PointSet:
    """``n`` i.i.d. uniform points in the Euclidean unit ball of R^d.

    Direction from a normalized Gaussian vector, radius ``U^(1/d)``.
    """
    if int(d) != d or d < 1:
        raise UsageError(f"dimension must be >= 1, got {d!r}")
    if int(n) != n or n < 0:
        raise UsageError(f"n must be a nonnegative integer, got {n!r}")
    rng = seed.generator()
    g = rng.standard_normal((d, n))
    norms = np.sqrt(np.sum(g * g, axis=0))
    # a zero Gaussian vector has probability zero; guard the division anyway
    norms[norms == 0.0] = 1.0
    radius = rng.random(n) ** (1.0 / d)
    cols = g * (radius / norms)
    # rounding can push |x| a hair past 1; pull such points back inside
    over = np.sqrt(np.sum(cols * cols, axis=0))
    bad = over > 1.0
    if bad.any():
        cols[:, bad] /= np.nextafter(over[bad], np.inf)
    return PointSet(columns=cols)


def sample_d1(n: int, seed: Seed) -> np.ndarray:
    """Sorted sample of ``n`` uniform points of [-1, 1]."""
    pts = sample_unit_ball(n, 1, seed)
    return np.sort(pts.columns[0])
