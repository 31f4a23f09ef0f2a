"""Error-free summation helpers for long orbit sums."""

import math

import numpy as np


def two_sum(a: float, b: float) -> tuple[float, float]:
    """Return (s, t) with s = fl(a + b) and a + b = s + t exactly."""
    s = a + b
    bp = s - a
    ap = s - bp
    return s, (a - ap) + (b - bp)


class CompensatedSum:
    """Running sum that carries the rounding error of every addition.

    Usage:
        acc = CompensatedSum()
        for v in values:
            acc.add(v)
        total = acc.value
    """

    __slots__ = ("_hi", "_lo", "count")

    def __init__(self, start=0.0):
        self._hi = float(start)
        self._lo = 0.0
        self.count = 0

    def add(self, value):
        """Add one term."""
        hi, err = two_sum(self._hi, float(value))
        self._hi = hi
        self._lo += err
        self.count += 1

    def extend(self, values):
        """Add every term of an iterable or array."""
        arr = np.asarray(values, dtype=float)
        if arr.size == 0:
            return
        # fsum of the block is exact to one rounding, so fold it in as one term
        self.add(math.fsum(arr.tolist()))
        self.count += arr.size - 1

    def __iadd__(self, value):
        self.add(value)
        return self

    @property
    def value(self):
        return self._hi + self._lo

    def __float__(self):
        return self.value

    def __repr__(self):
        return f"CompensatedSum({self.value!r}, terms={self.count})"


def compensated_prefix_sums(values) -> np.ndarray:
    """Inclusive prefix sums with two-sum carries at every doubling step.

    out[i] = values[0] + ... + values[i], computed by a Hillis-Steele scan
    whose rounding errors are kept in a parallel low-order array.
    """
    hi = np.array(values, dtype=float)
    n = hi.size
    if n == 0:
        return hi
    lo = np.zeros(n)
    shift = 1
    while shift < n:
        a = hi[shift:]
        b = hi[:-shift]
        s = a + b
        bp = s - a
        ap = s - bp
        err = (a - ap) + (b - bp)
        new_lo = lo.copy()
        new_lo[shift:] = lo[shift:] + lo[:-shift] + err
        new_hi = hi.copy()
        new_hi[shift:] = s
        hi, lo = new_hi, new_lo
        shift <<= 1
    return hi + lo


def exact_sum(values) -> float:
    """Correctly rounded sum of a finite sequence."""
    return math.fsum(np.asarray(values, dtype=float).tolist())
