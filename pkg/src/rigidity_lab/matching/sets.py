"""The sample sets of the matching argument: E_k on the f side, Z on the g side."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from rigidity_lab.arith.circle import arc_contains, circle_distance, frac
from rigidity_lab.dynamics.roof import as_rotation
from rigidity_lab.errors import ScaleUnavailable
from rigidity_lab.matching.constants import Branch, Mode

log = logging.getLogger(__name__)

# Z2 keeps every B_n up to the first q'_n at or beyond this size
Z_TRUNCATION_Q = 1_000_000
SAMPLE_BATCH = 4096


def _scale_check(alpha, k, constants):
    """Base arc (lo, hi) and iterate range for E_k, or ScaleUnavailable."""
    c = constants.c
    q, q_next = alpha.q(k), alpha.q(k + 1)
    if constants.branch is Branch.BOUNDED:
        lo, hi = c * c / q, 2.0 * c * c / q
    else:
        ratio = q_next / q
        if constants.mode is Mode.DESK:
            need, lo, hi = 4.0 / c, 2.0 / q_next, c / (2.0 * q)
        else:
            need, lo, hi = 2.0 / (c * c), 2.0 / q_next, c * c / q
        if not ratio > need:
            raise ScaleUnavailable(f"q_{k + 1}/q_{k} = {ratio:.4g} is not above {need:.4g}")
    i_hi = int(math.floor(c * c * q))
    if i_hi < k:
        raise ScaleUnavailable(f"c^2 q_{k} = {c * c * q:.4g} is below the scale index {k}")
    return lo, hi, k, i_hi


def admissible_scales(alpha, constants, q_min=1, q_max=10 ** 6):
    """Scale indices k with q_min <= q_k <= q_max where E_k can be built."""
    found = []
    n = 1
    while alpha.q(n) <= q_max:
        if alpha.q(n) >= q_min:
            try:
                _scale_check(alpha, n, constants)
            except ScaleUnavailable:
                pass
            else:
                found.append(n)
        n += 1
    return found


@dataclass(frozen=True)
class EkSample:
    x: float
    s: float
    witness: int


@dataclass
class EkSet:
    """Union over i in [i_lo, i_hi] of the base arc pulled back i steps, lifted
    under f and cut down to the heights below both f(x) and f(x - c/q)."""

    alpha: object
    roof: object
    k: int
    shift: float
    lo: float
    hi: float
    i_lo: int
    i_hi: int
    branch: Branch
    offsets: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.offsets = as_rotation(self.alpha).offsets(self.i_lo, self.i_hi + 1)

    @property
    def q(self):
        return self.alpha.q(self.k)

    @property
    def iterates(self):
        return self.i_hi - self.i_lo + 1

    @property
    def measure(self):
        """Lebesgue measure of the base union; the pulled-back arcs are disjoint."""
        return self.iterates * (self.hi - self.lo)

    def contains(self, x):
        """Witness i with x + i alpha in the base arc, or None."""
        u = frac(x + self.offsets)
        hits = np.nonzero((u >= self.lo) & (u <= self.hi))[0]
        return None if hits.size == 0 else self.i_lo + int(hits[0])

    def member(self, x, s):
        if self.contains(x) is None:
            return False
        return 0.0 <= s < min(self.roof.eval(x), self.roof.eval(x - self.shift))

    def partner(self, x):
        """The translate x' = x - c/q_k."""
        return frac(x - self.shift)

    def sample(self, rng):
        """Uniform draw from the lifted set."""
        f = self.roof
        top = f.sup_bound
        while True:
            i = int(rng.integers(self.i_lo, self.i_hi + 1))
            u = self.lo + (self.hi - self.lo) * float(rng.random())
            x = frac(u - self.offsets[i - self.i_lo])
            s = top * float(rng.random())
            if s < f.eval(x) and s < f.eval(x - self.shift):
                return EkSample(x, s, i)

    def multiplicity(self, x):
        u = frac(x + self.offsets)
        return int(((u >= self.lo) & (u <= self.hi)).sum())

    def empirical_measure(self, rng, samples=10_000):
        """Union-measure estimate sum(|arcs|) * E[1/multiplicity], plus the
        lifted measure estimate and its standard error."""
        if samples <= 0:
            raise ValueError("samples must be positive")
        f = self.roof
        inv_mult = np.empty(samples)
        heights = np.empty(samples)
        for j in range(samples):
            i = int(rng.integers(self.i_lo, self.i_hi + 1))
            u = self.lo + (self.hi - self.lo) * float(rng.random())
            x = frac(u - self.offsets[i - self.i_lo])
            inv_mult[j] = 1.0 / self.multiplicity(x)
            heights[j] = min(f.eval(x), f.eval(x - self.shift)) * inv_mult[j]
        base = self.measure * float(inv_mult.mean())
        lifted = self.measure * float(heights.mean())
        err = self.measure * float(heights.std(ddof=1)) / math.sqrt(samples) if samples > 1 else 0.0
        return base, lifted, err

    def forward_backward_hits(self, x):
        """Check the forward hit at the witness i and the backward hit at q_k - i."""
        i = self.contains(x)
        if i is None:
            return False, False
        x2 = self.partner(x)
        rot = as_rotation(self.alpha)
        forward = bool(arc_contains(rot.point(x, i), rot.point(x2, i)))
        if self.branch is Branch.BOUNDED:
            return forward, None
        back = rot.reversed()
        backward = bool(arc_contains(back.point(x, self.q - i), back.point(x2, self.q - i)))
        return forward, backward


def build_Ek(alpha, f, k, constants):
    lo, hi, i_lo, i_hi = _scale_check(alpha, k, constants)
    shift = constants.c / alpha.q(k)
    log.debug("E_%d: arc [%.3g, %.3g], iterates %d..%d", k, lo, hi, i_lo, i_hi)
    return EkSet(alpha, f, k, shift, lo, hi, i_lo, i_hi, constants.branch)


def _block_bound(q):
    """Lebesgue bound for B_n: (2 floor(sqrt q) + 1) arcs of length 1/(3q)."""
    return (2 * math.isqrt(q) + 1) / (3.0 * q)


def _geometric_tail(beta, n):
    """Bound on sum_{j > n} 1/sqrt(q'_j), using q'_{j+2} >= 2 q'_j."""
    return (1.0 / math.sqrt(beta.q(n + 1)) + 1.0 / math.sqrt(beta.q(n + 2))) / (1.0 - 2 ** -0.5)


@dataclass
class ZSet:
    """Z = Z1 n Z2: heights delta away from floor and roof, base points outside
    the resonant blocks B_n for m <= n <= n_max."""

    beta: object
    roof: object
    delta: float
    m: int
    n_max: int
    tail: float
    centers: dict = field(repr=False)

    @property
    def block_measure(self):
        return math.fsum(_block_bound(self.beta.q(n)) for n in range(self.m, self.n_max + 1))

    @property
    def slack(self):
        """Measure bound on the excluded blocks, truncated tail included."""
        return self.block_measure + self.tail

    def in_blocks(self, y):
        """Boolean (array) for membership in some B_n, m <= n <= n_max."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        out = np.zeros(y.shape, dtype=bool)
        for n, pts in self.centers.items():
            radius = 1.0 / (6.0 * self.beta.q(n))
            idx = np.searchsorted(pts, y)
            left = pts[(idx - 1) % pts.size]
            right = pts[idx % pts.size]
            d = np.minimum(circle_distance(y, left), circle_distance(y, right))
            out |= d < radius
        return out

    def contains_base(self, y):
        return not bool(self.in_blocks(y)[0])

    def contains(self, y, r):
        if not self.delta < r < self.roof.eval(y) - self.delta:
            return False
        return self.contains_base(y)

    def sample(self, rng, count):
        """Uniform draws from Z under the roof of g."""
        g = self.roof
        ys, rs = [], []
        have = 0
        while have < count:
            y = rng.random(SAMPLE_BATCH)
            r = rng.random(SAMPLE_BATCH) * g.sup_bound
            ok = (r > self.delta) & (r < g.eval_many(y) - self.delta)
            ok &= ~self.in_blocks(y)
            ys.append(y[ok])
            rs.append(r[ok])
            have += int(ok.sum())
        return np.concatenate(ys)[:count], np.concatenate(rs)[:count]

    def empirical_measure(self, rng, samples=100_000):
        """Fraction of uniform points under the roof that land in Z, and its
        standard error."""
        g = self.roof
        hits = 0
        total = 0
        while total < samples:
            n = min(SAMPLE_BATCH, samples - total)
            y = rng.random(n)
            r = rng.random(n) * g.sup_bound
            under = r < g.eval_many(y)
            y, r = y[under], r[under]
            ok = (r > self.delta) & (r < g.eval_many(y) - self.delta) & ~self.in_blocks(y)
            hits += int(ok.sum())
            total += int(under.sum())
        p = hits / total
        return p, math.sqrt(p * (1.0 - p) / total)


def _first_block(beta, n_max, budget):
    """Smallest m whose blocks m..n_max plus the tail past n_max fit the
    budget, or None."""
    tail = _geometric_tail(beta, n_max)
    for m in range(1, n_max + 1):
        used = math.fsum(_block_bound(beta.q(n)) for n in range(m, n_max + 1))
        if used + tail < budget:
            return m
    return None


def build_Z(beta, g, constants, n_max=None):
    eps, delta = constants.epsilon, constants.delta
    if delta is None:
        raise ScaleUnavailable("Z needs delta, which requires a positive infimum of g")
    budget = eps / (4.0 * g.sup_bound)
    if n_max is None:
        n_max = beta.index_exceeding(Z_TRUNCATION_Q - 1)
    m = _first_block(beta, n_max, budget)
    while m is None:
        n_max += 1
        m = _first_block(beta, n_max, budget)
    tail = _geometric_tail(beta, n_max)
    rot = as_rotation(beta)
    centers = {}
    for n in range(m, n_max + 1):
        r = math.isqrt(beta.q(n))
        centers[n] = np.sort(frac(rot.offsets(-r, r + 1)))
    log.debug("Z: blocks %d..%d, tail %.3g, budget %.3g", m, n_max, tail, budget)
    return ZSet(beta, g, delta, m, n_max, tail, centers)
