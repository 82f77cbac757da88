"""Exact (error-free) accumulation of float64 sums.

Each float64 is split into a 53-bit integer mantissa and a binary exponent;
mantissas are summed per exponent in integer-valued float64 bins (exact while
the bin total stays below 2**53) and folded into a :class:`fractions.Fraction`.
Partials therefore combine associatively and the final rounding happens once,
which makes the result independent of how the values were grouped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

# Keeps |bin total| < 2**53 with 27-bit mantissa halves.
_CHUNK = 1 << 25
_HALF = 26


def exact_sum(values: np.ndarray) -> Fraction:
    values = np.asarray(values, dtype=np.float64).ravel()
    if not np.all(np.isfinite(values)):
        raise ValueError("cannot accumulate non-finite values")
    total = Fraction(0)
    for start in range(0, values.size, _CHUNK):
        total += _chunk_sum(values[start : start + _CHUNK])
    return total


def _chunk_sum(x):
    if x.size == 0:
        return Fraction(0)
    mant, expo = np.frexp(x)
    ints = np.ldexp(mant, 53).astype(np.int64)
    hi = ints >> _HALF
    lo = ints - (hi << _HALF)
    emin = int(expo.min())
    idx = expo - emin
    hi_bins = np.bincount(idx, weights=hi.astype(np.float64))
    lo_bins = np.bincount(idx, weights=lo.astype(np.float64))
    num = 0
    for k in np.flatnonzero((hi_bins != 0) | (lo_bins != 0)):
        num += ((int(hi_bins[k]) << _HALF) + int(lo_bins[k])) << int(k)
    shift = emin - 53
    return Fraction(num << shift) if shift >= 0 else Fraction(num, 1 << -shift)


@dataclass(frozen=True)
class Partial:
    """Exact sum, sum of squares and count over a set of values."""

    total: Fraction
    total_sq: Fraction
    count: int

    @classmethod
    def of(cls, values) -> "Partial":
        values = np.asarray(values, dtype=np.float64).ravel()
        return cls(exact_sum(values), exact_sum(values * values), int(values.size))

    @classmethod
    def empty(cls) -> "Partial":
        return cls(Fraction(0), Fraction(0), 0)

    def __add__(self, other: "Partial") -> "Partial":
        return Partial(self.total + other.total, self.total_sq + other.total_sq, self.count + other.count)

    @property
    def sum(self) -> float:
        return float(self.total)

    @property
    def sumsq(self) -> float:
        return float(self.total_sq)

    def mean_stderr(self) -> tuple:
        n = self.count
        mean = self.total / n
        if n == 1:
            return float(mean), 0.0
        var = (self.total_sq - self.total * mean) / (n - 1)
        var = max(var, Fraction(0))
        return float(mean), math.sqrt(float(var / n))
