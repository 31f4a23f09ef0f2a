"""Circle geometry on T = R/Z and the rotation orbit evaluator."""

import math

import mpmath
import numpy as np

# i * alpha_hi stays exact while i < 2**27
HI_BITS = 26
MAX_EXACT_INDEX = 1 << 27


def frac(x):
    """Fractional part in [0, 1), scalar or array."""
    if isinstance(x, np.ndarray):
        r = x - np.floor(x)
        return np.where(r >= 1.0, 0.0, r)
    r = x - math.floor(x)
    return 0.0 if r >= 1.0 else r


def circle_distance(x, y):
    """The circle norm ||x - y||."""
    d = frac(x - y)
    if isinstance(d, np.ndarray):
        return np.minimum(d, 1.0 - d)
    return min(d, 1.0 - d)


def signed_displacement(x, y):
    """Representative of x - y in (-1/2, 1/2]."""
    d = frac(x - y)
    if isinstance(d, np.ndarray):
        return np.where(d > 0.5, d - 1.0, d)
    return d - 1.0 if d > 0.5 else d


def arc_contains(y, y2, point=0.0):
    """Whether the shorter closed arc between y and y2 contains point.

    Works elementwise when y and y2 are arrays.
    """
    d = signed_displacement(y2, y)
    if isinstance(d, np.ndarray):
        left = np.where(d >= 0, y, y2)
        return frac(point - left) <= np.abs(d)
    left = y if d >= 0 else y2
    return frac(point - left) <= abs(d)


class Rotation:
    """The rotation x -> x + sign * alpha, evaluated along long orbits.

    alpha is split as alpha_hi + alpha_lo where alpha_hi carries HI_BITS bits,
    so frac(i * alpha_hi) is exact and only the small alpha_lo part rounds.
    """

    def __init__(self, alpha_mp, sign=1):
        if sign not in (1, -1):
            raise ValueError(f"rotation sign must be +1 or -1, got {sign}")
        self.alpha_mp = mpmath.mpf(alpha_mp)
        scaled = mpmath.floor(self.alpha_mp * (1 << HI_BITS))
        self.alpha_hi = float(scaled) / (1 << HI_BITS)
        self.alpha_lo = float(self.alpha_mp - mpmath.mpf(self.alpha_hi))
        self.sign = sign

    @property
    def value(self):
        return self.alpha_hi + self.alpha_lo

    def reversed(self):
        """The inverse rotation."""
        return Rotation(self.alpha_mp, -self.sign)

    def offset(self, i):
        """frac(i * alpha) for an integer i, signed by the orientation."""
        if abs(i) >= MAX_EXACT_INDEX:
            raise OverflowError(f"orbit index {i} beyond exact range")
        return frac(self.sign * (frac(i * self.alpha_hi) + i * self.alpha_lo))

    def point(self, x, i):
        """The i-th iterate of x."""
        return frac(x + self.sign * (frac(i * self.alpha_hi) + i * self.alpha_lo))

    def offsets(self, start, stop):
        """Array of offsets for i in [start, stop)."""
        if max(abs(start), abs(stop)) > MAX_EXACT_INDEX:
            raise OverflowError(f"orbit range [{start}, {stop}) beyond exact range")
        i = np.arange(start, stop, dtype=np.int64).astype(float)
        return self.sign * (frac(i * self.alpha_hi) + i * self.alpha_lo)

    def offsets_at(self, indices):
        """Offsets for an arbitrary integer array of orbit indices."""
        i = np.asarray(indices, dtype=np.int64)
        if i.size and int(np.abs(i).max()) >= MAX_EXACT_INDEX:
            raise OverflowError("orbit index beyond exact range")
        i = i.astype(float)
        return self.sign * (frac(i * self.alpha_hi) + i * self.alpha_lo)

    def orbit(self, x, start, stop):
        """Array of iterates of x for i in [start, stop)."""
        return frac(x + self.offsets(start, stop))

    def __repr__(self):
        return f"Rotation(alpha={self.value!r}, sign={self.sign})"
