"""Roof functions f(x) = A{x} + f_ac(x) and their Birkhoff-sum cocycles."""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from rigidity_lab.arith.circle import Rotation, frac
from rigidity_lab.arith.diophantine import ostrowski_decompose
from rigidity_lab.arith.summation import CompensatedSum, compensated_prefix_sums
from rigidity_lab.errors import NonfiniteVariation, ZeroJump

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
CERT_GRID = 4096
CHUNK = 1 << 18
EXACT_MAX_N = 10_000


@dataclass(frozen=True)
class Harmonic:
    """a cos(2 pi k x) + b sin(2 pi k x)."""

    k: int
    cos: float
    sin: float

    @property
    def amplitude(self):
        return math.hypot(self.cos, self.sin)


@dataclass(frozen=True)
class RoofFunction:
    """A{x} + c0 + sum of harmonics, with cached analytic bounds.

    jump may be negative or zero for auxiliary cocycles; flows require a
    positive certified infimum, which special_flow checks.
    """

    jump: float = 0.0
    constant: float = 0.0
    harmonics: tuple = ()
    mean: float = field(init=False, compare=False)
    variation: float = field(init=False, compare=False)
    derivative_sup: float = field(init=False, compare=False)
    lipschitz: float = field(init=False, compare=False)
    inf_bound: float = field(init=False, compare=False)
    sup_bound: float = field(init=False, compare=False)

    def __post_init__(self):
        values = [self.jump, self.constant]
        harmonics = []
        seen = set()
        for h in self.harmonics:
            if not isinstance(h, Harmonic):
                h = Harmonic(*h)
            if int(h.k) != h.k or h.k <= 0:
                raise NonfiniteVariation(f"harmonic index must be a positive integer, got {h.k}")
            if h.k in seen:
                raise NonfiniteVariation(f"harmonic {h.k} listed twice")
            seen.add(h.k)
            values.extend((h.cos, h.sin))
            harmonics.append(Harmonic(int(h.k), float(h.cos), float(h.sin)))
        if not all(math.isfinite(v) for v in values):
            raise NonfiniteVariation("roof coefficients must be finite")
        harmonics.sort(key=lambda h: h.k)
        object.__setattr__(self, "jump", float(self.jump))
        object.__setattr__(self, "constant", float(self.constant))
        object.__setattr__(self, "harmonics", tuple(harmonics))

        dsup = math.fsum(TWO_PI * h.k * h.amplitude for h in harmonics)
        object.__setattr__(self, "mean", self.jump / 2.0 + self.constant)
        object.__setattr__(self, "derivative_sup", dsup)
        object.__setattr__(self, "variation", abs(self.jump) + dsup)
        object.__setattr__(self, "lipschitz", abs(self.jump) + dsup)

        grid = np.arange(CERT_GRID) / CERT_GRID
        vals = self.eval_many(grid)
        left_limit = self.jump + self.smooth_at(1.0)
        lo = min(float(vals.min()), left_limit)
        hi = max(float(vals.max()), left_limit)
        slack = self.lipschitz / (2.0 * CERT_GRID)
        object.__setattr__(self, "inf_bound", lo - slack)
        object.__setattr__(self, "sup_bound", hi + slack)

    @classmethod
    def make(cls, jump=0.0, c0=0.0, harmonics=None):
        """Build from a {k: (cos, sin)} mapping."""
        harmonics = harmonics or {}
        return cls(jump, c0, tuple(Harmonic(k, a, b) for k, (a, b) in harmonics.items()))

    @classmethod
    def constant_roof(cls, value):
        return cls(0.0, value, ())

    @property
    def is_smooth(self):
        return self.jump == 0.0

    def smooth_at(self, x):
        """f_ac(x)."""
        total = self.constant
        for h in self.harmonics:
            t = TWO_PI * h.k * x
            total += h.cos * math.cos(t) + h.sin * math.sin(t)
        return total

    def eval(self, x):
        """f(x) with {0} = 0."""
        return self.jump * frac(x) + self.smooth_at(x)

    __call__ = eval

    def eval_many(self, xs):
        """Vectorized f over an array of circle points."""
        xs = np.asarray(xs, dtype=float)
        out = self.jump * frac(xs) + self.constant
        for h in self.harmonics:
            t = TWO_PI * h.k * xs
            out = out + h.cos * np.cos(t) + h.sin * np.sin(t)
        return out

    def smooth_part(self):
        """f_ac as a roof with no jump."""
        return RoofFunction(0.0, self.constant, self.harmonics)

    def derivative(self):
        """f_ac' as a roof with no jump."""
        return RoofFunction(
            0.0,
            0.0,
            tuple(
                Harmonic(h.k, TWO_PI * h.k * h.sin, -TWO_PI * h.k * h.cos)
                for h in self.harmonics
            ),
        )

    def coefficient(self, k):
        """(cos, sin) coefficients of harmonic k, zeros when absent."""
        for h in self.harmonics:
            if h.k == k:
                return h.cos, h.sin
        return 0.0, 0.0

    def __sub__(self, other):
        ks = sorted({h.k for h in self.harmonics} | {h.k for h in other.harmonics})
        parts = []
        for k in ks:
            a1, b1 = self.coefficient(k)
            a2, b2 = other.coefficient(k)
            if a1 - a2 or b1 - b2:
                parts.append(Harmonic(k, a1 - a2, b1 - b2))
        return RoofFunction(self.jump - other.jump, self.constant - other.constant, tuple(parts))

    def to_text(self):
        parts = [f"jump={self.jump!r}", f"c0={self.constant!r}"]
        parts.extend(f"k:{h.k}={h.cos!r},{h.sin!r}" for h in self.harmonics)
        return "; ".join(parts)

    @classmethod
    def from_text(cls, text):
        """Parse `jump=A; c0=C; k:1=a,b; ...`."""
        jump, c0, harmonics = 0.0, 0.0, []
        for raw in text.split(";"):
            item = raw.strip()
            if not item:
                continue
            key, sep, value = item.partition("=")
            if not sep:
                raise ValueError(f"roof term {item!r} has no '='")
            key = key.strip()
            try:
                if key == "jump":
                    jump = float(value)
                elif key == "c0":
                    c0 = float(value)
                elif key.startswith("k:"):
                    a, b = (float(v) for v in value.split(","))
                    harmonics.append(Harmonic(int(key[2:]), a, b))
                else:
                    raise ValueError(f"unknown roof term {key!r}")
            except ValueError as e:
                raise ValueError(f"bad roof term {item!r}: {e}") from e
        return cls(jump, c0, tuple(harmonics))

    def __str__(self):
        return self.to_text()


def eval_roof(f, x):
    return f.eval(x)


def as_rotation(alpha, sign=1):
    """Accept a ContinuedFraction or a ready Rotation."""
    if isinstance(alpha, Rotation):
        return alpha if sign == 1 else alpha.reversed()
    return alpha.rotation(sign)


def birkhoff_sum(f, alpha, x, n):
    """f^(n)(x): sum_{i<n} f(x + i alpha), and -f^(|n|)(x - |n| alpha) for n < 0."""
    if n == 0:
        return 0.0
    rot = as_rotation(alpha)
    if n > 0:
        start, stop, sign = 0, n, 1.0
    else:
        rot = rot.reversed()
        start, stop, sign = 1, -n + 1, -1.0
    acc = CompensatedSum()
    for lo in range(start, stop, CHUNK):
        hi = min(lo + CHUNK, stop)
        acc.extend(f.eval_many(rot.orbit(x, lo, hi)))
    return sign * acc.value


def birkhoff_sums(f, alpha, x, n, direction=1):
    """Array S with S[m] = f^(direction*m)(x) for m = 0..n."""
    rot = as_rotation(alpha)
    if direction == 1:
        vals = f.eval_many(rot.orbit(x, 0, n))
        sign = 1.0
    elif direction == -1:
        vals = f.eval_many(rot.reversed().orbit(x, 1, n + 1))
        sign = -1.0
    else:
        raise ValueError("direction must be +1 or -1")
    out = np.empty(n + 1)
    out[0] = 0.0
    out[1:] = sign * compensated_prefix_sums(vals)
    return out


def _to_fraction(v):
    if isinstance(v, Fraction):
        return v
    if isinstance(v, mpmath.mpf):
        man, exp = v.man_exp
        return Fraction(int(man)) * Fraction(2) ** int(exp)
    return Fraction(v)


def birkhoff_sum_exact(f, alpha, x, n):
    """Oracle f^(n)(x) for n >= 0: rational jump and constant, 200-bit harmonics.

    alpha may be a Fraction or a ContinuedFraction (its value is taken to
    200 bits and treated as an exact dyadic rational).
    """
    if not 0 <= n <= EXACT_MAX_N:
        raise ValueError(f"exact sums support 0 <= n <= {EXACT_MAX_N}")
    if not isinstance(alpha, Fraction):
        alpha = _to_fraction(alpha.value(200))
    x = _to_fraction(x)
    points = []
    frac_total = Fraction(0)
    for i in range(n):
        z = x + i * alpha
        z -= z.numerator // z.denominator
        points.append(z)
        frac_total += z
    total = _to_fraction(f.jump) * frac_total + n * _to_fraction(f.constant)
    with mpmath.workprec(200):
        smooth = mpmath.mpf(0)
        for h in f.harmonics:
            for z in points:
                t = 2 * mpmath.pi * h.k * mpmath.mpf(z.numerator) / z.denominator
                smooth += h.cos * mpmath.cos(t) + h.sin * mpmath.sin(t)
        return float(mpmath.mpf(total.numerator) / total.denominator + smooth)


def _sums_at(f, rot, xs, n):
    """f^(n)(x) for every x in xs, n >= 0, as one vector."""
    xs = np.asarray(xs, dtype=float)
    hi = np.zeros(xs.size)
    lo = np.zeros(xs.size)
    block = max(1, CHUNK // max(1, xs.size))
    for start in range(0, n, block):
        stop = min(start + block, n)
        offs = rot.offsets(start, stop)
        part = f.eval_many(frac(xs[:, None] + offs[None, :])).sum(axis=1)
        s = hi + part
        bp = s - hi
        lo += (hi - (s - bp)) + (part - bp)
        hi = s
    return hi + lo


@dataclass(frozen=True)
class DKRecord:
    n: int
    q: int
    sup_deviation: float
    argmax: float


@dataclass(frozen=True)
class DKReport:
    """Sup deviations of f^(q_n) from q_n * mean per denominator index."""

    records: tuple
    variation: float
    samples: int
    linear_violations: tuple = ()

    @property
    def violations(self):
        return [r for r in self.records if r.sup_deviation > self.variation + 1e-9]

    @property
    def ok(self):
        return not self.violations and not self.linear_violations


def dk_audit(f, alpha, index_range, samples, seed, linear_pairs=(), linear_trials=64):
    """Denjoy-Koksma audit at denominator times, plus optional linear-bound checks.

    linear_pairs holds (eps, n_eps) pairs; for each, random n >= n_eps are
    checked against |f^(n)(x) - n mean| <= eps n.
    """
    if not all(math.isfinite(v) for v in (f.variation, f.mean)):
        raise NonfiniteVariation("roof has no finite variation bound")
    rot = as_rotation(alpha)
    children = np.random.SeedSequence(seed).spawn(len(index_range) + 1)
    records = []
    for child, n in zip(children, index_range):
        rng = np.random.default_rng(child)
        xs = rng.random(samples)
        q = alpha.q(n)
        dev = np.abs(_sums_at(f, rot, xs, q) - q * f.mean)
        i = int(np.argmax(dev))
        records.append(DKRecord(n, q, float(dev[i]), float(xs[i])))
    linear = []
    for eps, n_eps in linear_pairs:
        linear.extend(
            linear_bound_audit(f, alpha, eps, n_eps, linear_trials, children[-1])
        )
    return DKReport(tuple(records), f.variation, samples, tuple(linear))


def linear_bound_audit(f, alpha, eps, n_eps, trials, seed, n_max=None):
    """Random (n, x) with n >= n_eps where |f^(n)(x) - n mean| > eps n."""
    rng = np.random.default_rng(seed)
    n_max = n_max or max(10 * n_eps, n_eps + 1)
    violations = []
    for _ in range(trials):
        n = int(rng.integers(n_eps, n_max + 1))
        x = float(rng.random())
        dev = abs(birkhoff_sum(f, alpha, x, n) - n * f.mean)
        if dev > eps * n:
            violations.append((eps, n, x, dev))
    return violations


def empirical_n_eps(f, alpha, eps, samples=64, seed=0, n_max=100_000):
    """Smallest n after which every sampled |f^(m)(x)/m - mean| stays <= eps.

    Returns None when the deviation still exceeds eps at n_max. The value is
    empirical and not claimed to be minimal.
    """
    rng = np.random.default_rng(seed)
    worst = np.zeros(n_max + 1)
    m = np.arange(n_max + 1, dtype=float)
    for x in rng.random(samples):
        sums = birkhoff_sums(f, alpha, float(x), n_max)
        np.maximum(worst, np.abs(sums - m * f.mean), out=worst)
    ratio = worst[1:] / m[1:]
    bad = np.nonzero(ratio > eps)[0]
    if bad.size == 0:
        return 1
    last = int(bad[-1]) + 1
    if last >= n_max:
        return None
    return last + 1


@dataclass(frozen=True)
class BlockRecord:
    index: int
    q: int
    offset: int
    block_sum: float
    deviation: float


@dataclass(frozen=True)
class OstrowskiSplit:
    n: int
    blocks: tuple
    total: float
    deviation_bound: float

    @property
    def deviation(self):
        return sum(b.deviation for b in self.blocks)


def ostrowski_birkhoff_split(f, cf, x, n):
    """Split f^(n)(x) into q-blocks following the Ostrowski digits of n.

    Each block of length q_i contributes at most Var(f) to the deviation,
    so the total deviation is bounded by Var(f) times the digit sum.
    """
    digits = ostrowski_decompose(n, cf)
    rot = as_rotation(cf)
    blocks = []
    offset = 0
    for i in range(len(digits.coefficients) - 1, -1, -1):
        q = digits.denominators[i]
        for _ in range(digits.coefficients[i]):
            s = birkhoff_sum(f, rot, rot.point(x, offset), q)
            blocks.append(BlockRecord(i, q, offset, s, abs(s - q * f.mean)))
            offset += q
    total = math.fsum(b.block_sum for b in blocks)
    bound = f.variation * sum(digits.coefficients)
    return OstrowskiSplit(n, tuple(blocks), total, bound)


@dataclass(frozen=True)
class ConjugationTag:
    """Records x -> 1 - x when a roof was reflected to a positive jump."""

    reflected: bool

    def map_point(self, x):
        return frac(-x) if self.reflected else x

    def __str__(self):
        return "x -> 1-x" if self.reflected else "identity"


def normalize_positive_jump(alpha, f):
    """Return (rotation, roof, tag) with a positive jump.

    For A < 0 the roof h(x) = f(1 - x) = (-A){x} + (A + f_ac(1 - x)) over
    x -> x - alpha is used; sums of h at 1 - x match sums of f at x.
    """
    if f.jump == 0.0:
        raise ZeroJump("roof has no jump; use the smooth pathway")
    if f.jump > 0:
        return as_rotation(alpha), f, ConjugationTag(False)
    # sin(2 pi k (1 - x)) = -sin(2 pi k x)
    reflected = RoofFunction(
        -f.jump,
        f.jump + f.constant,
        tuple(Harmonic(h.k, h.cos, -h.sin) for h in f.harmonics),
    )
    log.debug("Reflected roof %s to %s", f, reflected)
    return as_rotation(alpha, -1), reflected, ConjugationTag(True)
