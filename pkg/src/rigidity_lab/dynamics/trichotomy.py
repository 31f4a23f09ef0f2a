"""Arc-hitting combinatorics on the circle.

An arc [y, y'] is always the shorter one. Hits are found by a vectorized
float scan; candidates within a guard band of an arc endpoint are re-tested
at 128 bits and reported as ambiguous when even that cannot decide.
"""

import logging
from dataclasses import dataclass

import mpmath
import numpy as np

from rigidity_lab.arith.circle import circle_distance, frac, signed_displacement
from rigidity_lab.dynamics.roof import as_rotation
from rigidity_lab.errors import ArcTooWide

log = logging.getLogger(__name__)

FLOAT_GUARD = 1e-12
MP_BITS = 128
MP_GUARD = mpmath.mpf("1e-25")
SCAN_CHUNK = 1 << 18


@dataclass(frozen=True)
class ArcInterval:
    y: float
    y2: float

    def __post_init__(self):
        if self.length >= 0.5:
            raise ArcTooWide(f"arc [{self.y}, {self.y2}] has length {self.length} >= 1/2")

    @property
    def length(self):
        return circle_distance(self.y, self.y2)

    @property
    def left(self):
        """Endpoint from which the arc runs counterclockwise."""
        return self.y if signed_displacement(self.y2, self.y) >= 0 else self.y2

    def contains(self, point):
        return frac(point - self.left) <= self.length

    def shifted(self, c):
        return ArcInterval(frac(self.y + c), frac(self.y2 + c))


@dataclass(frozen=True)
class HitResult:
    index: int | None
    ambiguous: tuple = ()


def _mp_margin(left, length, rot, i, target):
    """Signed distance of target inside the arc at step i, at 128 bits."""
    with mpmath.workprec(MP_BITS):
        start = mpmath.mpf(left) + rot.sign * i * rot.alpha_mp
        u = mpmath.frac(mpmath.mpf(target) - start)
        inside = mpmath.mpf(length) - u
        outside = 1 - u
        # positive when inside; distance to the nearer endpoint either way
        return min(inside, u) if inside >= 0 else -min(-inside, outside)


def first_hit(x, x2, alpha, bound, target=0.0, sign=1):
    """Smallest l in [0, bound] with target in the arc moved l steps."""
    arc = ArcInterval(x, x2)
    rot = as_rotation(alpha, sign)
    left, length = arc.left, arc.length
    ambiguous = []
    start = 0
    size = 1024
    while start <= bound:
        stop = min(start + size, bound + 1)
        u = frac(target - (left + rot.offsets(start, stop)))
        hit = u <= length
        near = (np.abs(u - length) < FLOAT_GUARD) | (u > 1.0 - FLOAT_GUARD) | (u < FLOAT_GUARD)
        idx = np.nonzero(hit | near)[0]
        for j in idx:
            i = start + int(j)
            if not near[j]:
                return HitResult(i, tuple(ambiguous))
            margin = _mp_margin(left, length, rot, i, target)
            if abs(margin) < MP_GUARD:
                log.warning("Ambiguous grazing hit at step %d (margin %s)", i, mpmath.nstr(margin, 3))
                ambiguous.append(i)
                return HitResult(i, tuple(ambiguous))
            if margin > 0:
                return HitResult(i, tuple(ambiguous))
        start = stop
        size = min(size * 4, SCAN_CHUNK)
    return HitResult(None, tuple(ambiguous))


def first_hit_index(x, x2, alpha, bound, target=0.0, sign=1):
    """Smallest l in [0, bound] with target in [x + l alpha, x' + l alpha], or None."""
    return first_hit(x, x2, alpha, bound, target, sign).index


def first_hit_real(y, y2, beta, xi, bound, target=0.0, sign=1):
    """Least real k0 whose bracket [k0 / xi] is the first hitting step."""
    if xi <= 0:
        raise ValueError("xi must be positive")
    j = first_hit_index(y, y2, beta, bound, target, sign)
    return None if j is None else xi * j


@dataclass(frozen=True)
class TrichotomyVerdict:
    """Which of the three arc clauses hold at scale n.

    (i)   no forward iterate k <= q'_{n+1}/6 of the arc contains the target
    (ii)  the same for backward iterates
    (iii) some forward iterate k <= q'_n - 1 contains it
    """

    n: int
    holds_i: bool
    holds_ii: bool
    holds_iii: bool
    witness_i: int | None = None
    witness_ii: int | None = None
    witness_iii: int | None = None
    ambiguous: tuple = ()

    @property
    def any_holds(self):
        return self.holds_i or self.holds_ii or self.holds_iii

    def clauses(self):
        return [name for name, ok in (("i", self.holds_i), ("ii", self.holds_ii),
                                      ("iii", self.holds_iii)) if ok]


def classify(y, y2, beta, n, target=0.0, sign=1):
    """Evaluate the three clauses for the arc [y, y'] at denominator index n.

    sign = -1 swaps the roles of forward and backward iterates.
    """
    qn = beta.q(n)
    qn1 = beta.q(n + 1)
    dist = circle_distance(y, y2)
    if not dist < 1.0 / (6 * qn):
        raise ArcTooWide(f"||y - y'|| = {dist:.3g} is not below 1/(6 q'_{n}) = {1.0 / (6 * qn):.3g}")
    short = qn1 // 6
    forward = first_hit(y, y2, beta, max(short, qn - 1), target, sign)
    backward = first_hit(y, y2, beta, short, target, -sign)
    k = forward.index
    holds_i = k is None or k > short
    holds_iii = k is not None and k <= qn - 1
    holds_ii = backward.index is None
    return TrichotomyVerdict(
        n=n,
        holds_i=holds_i,
        holds_ii=holds_ii,
        holds_iii=holds_iii,
        witness_i=None if holds_i else k,
        witness_ii=backward.index,
        witness_iii=k if holds_iii else None,
        ambiguous=forward.ambiguous + backward.ambiguous,
    )
