"""Continued fractions, convergents, Ostrowski numeration and type checks.

Digit lists follow the recurrence

    q0 = q1 = 1,  q_{n+1} = a_n q_n + q_{n-1}
    p0 = 0,  p1 = 1,  p_{n+1} = a_n p_n + p_{n-1}

so a list (a1, a2, ...) denotes alpha = lim p_n/q_n = [0; 1, a1, a2, ...].
Every q_n is then a genuine convergent denominator of alpha.
"""

import logging
import re
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath

from rigidity_lab.arith.circle import Rotation
from rigidity_lab.errors import (
    EmptyResult,
    InsufficientDepth,
    NotInUnitInterval,
    PrecisionExhausted,
)

log = logging.getLogger(__name__)

DEFAULT_REAL_BITS = 128
# extra working bits on top of the input radius when expanding reals
GUARD_BITS = 64
MAX_AUTO_DEPTH = 10_000

_CF_RE = re.compile(r"^cf:\[\s*([0-9,\s]*?)\s*(,\s*\.\.\.)?\s*\]$")
_REAL_RE = re.compile(r"^real:\s*([0-9.eE+-]+)\s*(?:@\s*(\d+))?$")


def _recurrence(digits):
    q = [1, 1]
    p = [0, 1]
    for a in digits:
        q.append(a * q[-1] + q[-2])
        p.append(a * p[-1] + p[-2])
    return tuple(q), tuple(p)


def _tail_value(tail):
    """Value of the purely periodic fraction [0; tail, tail, ...]."""
    return (-tail + mpmath.sqrt(tail * tail + 4)) / 2


@dataclass(frozen=True)
class ContinuedFraction:
    """Partial quotients of a frequency with exact convergents.

    tail is the digit repeated forever after the listed ones; it is None for
    frequencies expanded from a real number, which cannot be deepened.
    """

    digits: tuple
    tail: int | None = 1
    source: str = "digits"
    real_text: str | None = None
    real_bits: int | None = None
    unreliable_last: bool = False
    denominators: tuple = field(init=False, repr=False, compare=False)
    numerators: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        digits = tuple(int(a) for a in self.digits)
        if not digits:
            raise InsufficientDepth("a continued fraction needs at least one digit")
        if any(a < 1 for a in digits):
            raise ValueError(f"partial quotients must be positive: {digits}")
        if self.tail is not None and self.tail < 1:
            raise ValueError(f"tail digit must be positive: {self.tail}")
        object.__setattr__(self, "digits", digits)
        q, p = _recurrence(digits)
        object.__setattr__(self, "denominators", q)
        object.__setattr__(self, "numerators", p)

    @classmethod
    def from_digits(cls, digits, repeat_last=False):
        """Digit-list frequency; the tail repeats 1 or the last digit."""
        digits = tuple(digits)
        tail = digits[-1] if repeat_last else 1
        return cls(digits=digits, tail=tail)

    @property
    def depth(self):
        return len(self.digits)

    def extended(self, depth):
        """Same frequency with at least depth listed digits."""
        if depth <= len(self.digits):
            return self
        if self.tail is None:
            raise InsufficientDepth(
                f"{self.source} frequency has {len(self.digits)} certified digits, "
                f"{depth} requested"
            )
        return _extend(self.digits, self.tail, depth, self.source)

    def digit(self, n):
        """a_n for n >= 1."""
        if n < 1:
            raise IndexError("digits are indexed from 1")
        return self.extended(n).digits[n - 1]

    def q(self, n):
        """Denominator q_n, deepening through the tail when needed."""
        if n < len(self.denominators):
            return self.denominators[n]
        return self.extended(n - 1).denominators[n]

    def p(self, n):
        """Numerator p_n."""
        if n < len(self.numerators):
            return self.numerators[n]
        return self.extended(n - 1).numerators[n]

    def convergent(self, n):
        """The n-th convergent as a (p, q) pair."""
        return self.p(n), self.q(n)

    def value(self, bits=DEFAULT_REAL_BITS):
        """alpha as an mpmath number carrying at least the requested bits."""
        with mpmath.workprec(bits + 16):
            if self.tail is None:
                x = mpmath.mpf(self.real_text)
                v = 1 - x if self.source.endswith("reflected") else x
                return +v
            v = _tail_value(self.tail)
            for a in reversed(self.digits):
                v = 1 / (a + v)
            return 1 / (1 + v)

    def rotation(self, sign=1):
        """Orbit evaluator for x -> x + sign * alpha."""
        return _rotation(self, sign)

    def index_exceeding(self, bound, cap=MAX_AUTO_DEPTH):
        """Smallest n >= 1 with q_n > bound."""
        n = 1
        while self.q(n) <= bound:
            n += 1
            if n > cap:
                raise InsufficientDepth(f"no denominator above {bound} within {cap} digits")
        return n

    def bracket_index(self, distance, scale):
        """Largest n >= 1 with 1/(scale*q_{n+1}) <= distance < 1/(scale*q_n)."""
        if distance <= 0:
            raise ValueError("bracket needs a positive distance")
        n = 1
        if distance >= 1.0 / (scale * self.q(1)):
            raise ValueError(f"distance {distance} too large for scale {scale}")
        while not distance >= 1.0 / (scale * self.q(n + 1)):
            n += 1
            if n > MAX_AUTO_DEPTH:
                raise InsufficientDepth("distance below every computed scale")
        return n

    def to_text(self):
        if self.tail is None:
            return f"real:{self.real_text}@{self.real_bits}"
        body = ",".join(str(a) for a in self.digits)
        if self.tail == 1:
            return f"cf:[{body}]"
        if self.tail == self.digits[-1]:
            return f"cf:[{body},...]"
        return f"cf:[{body},{self.tail},...]"

    @classmethod
    def from_text(cls, text):
        return parse_frequency(text)

    def __str__(self):
        return self.to_text()


@lru_cache(maxsize=64)
def _rotation(cf, sign):
    return Rotation(cf.value(160), sign)


@lru_cache(maxsize=256)
def _extend(digits, tail, depth, source):
    more = digits + (tail,) * (depth - len(digits))
    return ContinuedFraction(digits=more, tail=tail, source=source)


def parse_frequency(text):
    """Parse `cf:[a1,a2,...]` (optionally ending in `,...`) or `real:x@bits`."""
    text = text.strip()
    m = _CF_RE.match(text)
    if m:
        body, repeat = m.group(1), m.group(2)
        parts = [s for s in (t.strip() for t in body.split(",")) if s]
        if not parts:
            raise ValueError(f"empty digit list in {text!r}")
        return ContinuedFraction.from_digits(
            [int(s) for s in parts], repeat_last=bool(repeat)
        )
    m = _REAL_RE.match(text)
    if m:
        bits = int(m.group(2)) if m.group(2) else DEFAULT_REAL_BITS
        return cf_from_real(m.group(1), depth=None, bits=bits)
    raise ValueError(f"unrecognized frequency {text!r}")


def cf_from_real(x, depth=None, bits=DEFAULT_REAL_BITS):
    """Expand a real frequency in (0, 1) with certified digits.

    x is known to +-2**-bits. Both ends of the uncertainty interval are
    carried through the Gauss map at bits + GUARD_BITS; a digit is certified
    when both ends agree. An uncertain final digit is kept and flagged, an
    uncertain earlier digit raises PrecisionExhausted. With depth None the
    expansion stops at the first uncertain digit.
    """
    text = str(x).strip()
    if depth is not None and depth < 1:
        raise ValueError("depth must be at least 1")
    with mpmath.workprec(bits + GUARD_BITS):
        mid = mpmath.mpf(text)
        radius = mpmath.ldexp(1, -bits)
        if not 0 < mid < 1 or mid == mpmath.mpf(1) / 2:
            raise NotInUnitInterval(f"frequency {text} not in (0, 1) minus 1/2")
        lo, hi = mid - radius, mid + radius
        half = mpmath.mpf(1) / 2
        if lo <= half <= hi:
            raise PrecisionExhausted(f"{text} is within 2^-{bits} of 1/2")
        source = f"real:{text}@{bits}"
        if hi < half:
            log.info("Reflecting %s to its conjugate rotation number", text)
            lo, hi = 1 - hi, 1 - lo
            source += " reflected"
        if lo <= 0 or hi >= 1:
            raise PrecisionExhausted(f"{text} is within 2^-{bits} of the circle's origin")
        # v = 1/alpha - 1 has the listed digits as its ordinary expansion
        a_lo, a_hi = 1 / hi - 1, 1 / lo - 1
        digits = []
        unreliable = False
        target = depth if depth is not None else MAX_AUTO_DEPTH
        while len(digits) < target:
            if a_lo <= 0:
                if depth is None and digits:
                    break
                raise PrecisionExhausted(
                    f"{text}@{bits}: remainder reached zero after {len(digits)} digits"
                )
            w_lo, w_hi = 1 / a_hi, 1 / a_lo
            d_lo, d_hi = int(mpmath.floor(w_lo)), int(mpmath.floor(w_hi))
            if d_lo != d_hi:
                if depth is None:
                    if not digits:
                        raise PrecisionExhausted(f"{text}@{bits}: first digit uncertain")
                    break
                if len(digits) == depth - 1:
                    digits.append(d_lo)
                    unreliable = True
                    break
                raise PrecisionExhausted(
                    f"{text}@{bits}: digit {len(digits) + 1} of {depth} uncertain"
                )
            digits.append(d_lo)
            a_lo, a_hi = w_lo - d_lo, w_hi - d_lo
    return ContinuedFraction(
        digits=tuple(digits),
        tail=None,
        source=source,
        real_text=text,
        real_bits=bits,
        unreliable_last=unreliable,
    )


@dataclass(frozen=True)
class OstrowskiDigits:
    """n = sum b_i q_i with b_i <= q_{i+1}/q_i."""

    coefficients: tuple
    denominators: tuple

    @property
    def value(self):
        return sum(b * q for b, q in zip(self.coefficients, self.denominators))

    def bounds_hold(self):
        """Whether every b_i <= q_{i+1}/q_i."""
        qs = self.denominators
        return all(
            b * qs[i] <= qs[i + 1]
            for i, b in enumerate(self.coefficients[:-1])
        )

    def nonzero(self):
        """(index, coefficient) pairs with b_i > 0."""
        return [(i, b) for i, b in enumerate(self.coefficients) if b]


def ostrowski_decompose(n, cf):
    """Greedy decomposition of n over the listed denominators."""
    if n < 1:
        raise ValueError(f"ostrowski_decompose needs n >= 1, got {n}")
    qs = cf.denominators
    if qs[-1] <= n:
        raise InsufficientDepth(f"largest listed denominator {qs[-1]} does not exceed {n}")
    coeffs = [0] * len(qs)
    r = n
    for i in range(len(qs) - 1, 1, -1):
        if qs[i] <= r:
            coeffs[i], r = divmod(r, qs[i])
    # q0 = q1 = 1 share what is left below q2
    coeffs[0] = min(r, 1)
    coeffs[1] = r - coeffs[0]
    return OstrowskiDigits(tuple(coeffs), qs)


@dataclass(frozen=True)
class TypeVerdict:
    """Horizon-relative evidence about the partial quotients."""

    kind: str
    horizon: int
    bound: int
    M: int | None = None
    indices: tuple = ()

    @property
    def is_bounded(self):
        return self.kind == "bounded"

    def __str__(self):
        if self.is_bounded:
            return f"bounded({self.M}) up to n={self.horizon}"
        return f"unbounded-evidence at {list(self.indices)} up to n={self.horizon}"


def classify_type(cf, horizon, bound):
    """Bounded(1 + max digit) if every a_n <= bound, else the offending indices."""
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    digits = cf.extended(horizon).digits[:horizon]
    over = tuple(n for n, a in enumerate(digits, start=1) if a > bound)
    if over:
        return TypeVerdict("unbounded-evidence", horizon, bound, indices=over)
    return TypeVerdict("bounded", horizon, bound, M=1 + max(digits))


@dataclass(frozen=True)
class DCReport:
    tau: float
    C: float
    horizon: int
    violations: tuple

    @property
    def first_violation(self):
        return self.violations[0] if self.violations else None

    def __str__(self):
        if not self.violations:
            return f"no violation up to n={self.horizon}"
        return f"first violation at n={self.violations[0]} (all: {list(self.violations)})"


def _working_bits(cf, horizon):
    return 128 + 4 * cf.q(horizon + 1).bit_length()


def dc_check(cf, tau, C, horizon):
    """Check |alpha - p_n/q_n| > C / q_n^tau for n = 1..horizon."""
    if tau <= 0 or C <= 0:
        raise ValueError("tau and C must be positive")
    bits = _working_bits(cf, horizon)
    with mpmath.workprec(bits):
        alpha = cf.value(bits)
        violations = []
        for n in range(1, horizon + 1):
            p, q = cf.convergent(n)
            gap = abs(alpha - mpmath.mpf(p) / q)
            if not gap > mpmath.mpf(C) / mpmath.power(q, tau):
                violations.append(n)
    return DCReport(tau, C, horizon, tuple(violations))


def best_approximation_check(cf, horizon):
    """Indices n <= horizon where |alpha q_n - p_n| < 1/q_{n+1} fails."""
    bits = _working_bits(cf, horizon)
    failures = []
    with mpmath.workprec(bits):
        alpha = cf.value(bits)
        for n in range(1, horizon + 1):
            p, q = cf.convergent(n)
            if not abs(alpha * q - p) < mpmath.mpf(1) / cf.q(n + 1):
                failures.append(n)
    return failures


def unbounded_sequence(cf, threshold, horizon=None):
    """Indices n >= 1 with q_{n+1}/q_n >= threshold, increasing."""
    if threshold < 1:
        raise ValueError(f"threshold must be at least 1, got {threshold}")
    horizon = horizon or cf.depth
    found = [n for n in range(1, horizon + 1) if cf.q(n + 1) >= threshold * cf.q(n)]
    if not found:
        raise EmptyResult(f"no ratio q_(n+1)/q_n >= {threshold} up to n={horizon}")
    return found


def bounded_type_constant(cf, horizon=None):
    """sup q_{n+1}/q_n over n = 1..horizon."""
    horizon = horizon or cf.depth
    return max(cf.q(n + 1) / cf.q(n) for n in range(1, horizon + 1))
