"""Matching windows: the case analysis that picks M', L' and the shifts (p, q).

Shifts are the jump-model prediction at the window start: drift n * A * d
plus one jump of -sgn(d) * A for every crossing of the pair's arc over 0
among the summed iterates. sigma = -1 runs the same tree on backward sums.
"""

import logging
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from rigidity_lab.arith.circle import arc_contains, frac, signed_displacement
from rigidity_lab.dynamics.roof import as_rotation, birkhoff_sums
from rigidity_lab.dynamics.trichotomy import classify, first_hit
from rigidity_lab.errors import CaseFallthrough
from rigidity_lab.matching.constants import Branch

log = logging.getLogger(__name__)

REVERIFY_BITS = 96


@dataclass(frozen=True)
class MatchSample:
    """A trial: (x, s) in E_k with partner x2 = x - c/q_k, and a delta-close
    pair (y, r), (y2, r2) in Z whose distance brackets the index n."""

    x: float
    x2: float
    s: float
    y: float
    y2: float
    r: float
    r2: float
    k: int
    n: int | None

    @property
    def dx(self):
        return signed_displacement(self.x, self.x2)

    @property
    def dy(self):
        return signed_displacement(self.y, self.y2)

    @property
    def degenerate(self):
        return self.y == self.y2


@dataclass(frozen=True)
class MatchingWindow:
    M: int
    L: int
    p: float
    q: float
    sigma: int
    case: str
    x_hit: int | None = None
    y_hit: int | None = None

    def g_indices(self, xi):
        return math.floor(self.M / xi), math.floor((self.M + self.L) / xi)


@dataclass(frozen=True)
class WindowCheck:
    window: MatchingWindow
    residual_f: float
    residual_g: float
    in_P: bool
    length_ok: bool
    epsilon: float
    failure: str | None = field(default=None)

    @property
    def passed(self):
        return self.failure is None

    @property
    def combined(self):
        return self.residual_f + self.residual_g


def _sum_terms(a, freq, length, sigma):
    """Orbit points entering sums of the given length: a + i alpha for
    i < length forward, a - i alpha for 1 <= i <= length backward."""
    rot = as_rotation(freq, sigma)
    start = 0 if sigma == 1 else 1
    return frac(a + rot.offsets(start, start + length))


def jump_count(a, a2, freq, length, sigma=1):
    """Number of summed iterates whose arc [a_i, a2_i] contains 0."""
    if length <= 0 or a == a2:
        return 0
    return int(arc_contains(_sum_terms(a, freq, length, sigma),
                            _sum_terms(a2, freq, length, sigma)).sum())


def first_crossing(a, a2, freq, bound, sigma=1):
    """Iterate index l (sum length l + 1) of the first crossing, or None."""
    if a == a2:
        return None
    if sigma == 1:
        return first_hit(a, a2, freq, bound, 0.0, 1).index
    back = as_rotation(freq, -1)
    return first_hit(back.point(a, 1), back.point(a2, 1), freq, bound, 0.0, -1).index


def predicted_shift(a, a2, freq, jump, length, sigma):
    """sigma * (-sgn(d) * jump * crossings + length * jump * d), d = a - a2."""
    d = signed_displacement(a, a2)
    if d == 0.0:
        return 0.0
    crossings = jump_count(a, a2, freq, length, sigma)
    return sigma * (-math.copysign(jump, d) * crossings + length * jump * d)


def _window(sample, constants, f, g, alpha, beta, M, sigma, case, x_hit=None, y_hit=None):
    M = max(int(M), 0)
    L = constants.window_length(M)
    G = math.floor(M / constants.xi)
    p = predicted_shift(sample.x, sample.x2, alpha, f.jump, M, sigma)
    q = predicted_shift(sample.y, sample.y2, beta, g.jump, G, sigma)
    return MatchingWindow(M, L, p, q, sigma, case, x_hit, y_hit)


def degenerate_window(sample, constants, f, alpha):
    """y = y': M' = q_k, L' = ceil(kappa q_k), q = 0.

    p is the jump-model shift at q_k: the single crossing of an E_k pair
    plus the drift q_k A_f (x - x'), so p = -A_f (1 - c) for the default
    partner x' = x - c/q_k.
    """
    qk = alpha.q(sample.k)
    M = qk
    L = max(1, math.ceil(constants.kappa * qk))
    p = predicted_shift(sample.x, sample.x2, alpha, f.jump, M, 1)
    return (MatchingWindow(M, L, p, 0.0, 1, "degenerate"),)


def first_past(j, xi):
    """Smallest M' whose g index floor(M'/xi) exceeds j."""
    M = math.ceil(xi * (j + 1))
    while math.floor(M / xi) <= j:
        M += 1
    while M > 1 and math.floor((M - 1) / xi) > j:
        M -= 1
    return M


def _unbounded_tree(sample, constants, f, g, alpha, beta, sigma0):
    eps, xi, c = constants.epsilon, constants.xi, constants.c
    n = sample.n
    qn, qn1 = beta.q(n), beta.q(n + 1)
    qk = alpha.q(sample.k)
    dy = abs(sample.dy)

    verdict = classify(sample.y, sample.y2, beta, n, sign=sigma0)
    log.debug("Clauses at n=%d: %s", n, "+".join(verdict.clauses()) or "none")

    def case1(sigma, tag):
        ell = first_crossing(sample.x, sample.x2, alpha, 2 * qk, sigma)
        if ell is None:
            raise CaseFallthrough(f"no x-crossing within {2 * qk} steps")
        if ell * constants.A_g * dy > 4.0 * c:
            ell1 = math.floor(2.0 * c / (constants.A_g * dy))
            if math.floor(ell1 / xi) >= 1:
                return (_window(sample, constants, f, g, alpha, beta, ell1, sigma,
                                f"{tag}-sub1", ell, None),)
            # no g lap fits below ell1: take the window past the x-crossing
            return (_window(sample, constants, f, g, alpha, beta, ell + 1, sigma,
                            f"{tag}-sub1-past", ell, None),)
        return (_window(sample, constants, f, g, alpha, beta, ell + 1, sigma,
                        f"{tag}-sub2", ell, None),)

    if verdict.holds_i:
        return case1(sigma0, "case1")
    if verdict.holds_ii:
        return case1(-sigma0, "case1-reversed")
    if not verdict.holds_iii:
        raise CaseFallthrough(f"no arc clause holds at n={n}")

    sigma = sigma0
    ell = first_crossing(sample.x, sample.x2, alpha, 2 * qk, sigma)
    if ell is None:
        raise CaseFallthrough(f"no x-crossing within {2 * qk} steps")
    # summed-iterate index of the first y-crossing; equals the clause witness forward
    j0 = first_crossing(sample.y, sample.y2, beta, max(qn1 // 6, qn - 1), sigma)
    if j0 is None:
        raise CaseFallthrough(f"no summed y-crossing within {qn - 1} steps")
    k0 = xi * j0

    def make(M, label):
        return _window(sample, constants, f, g, alpha, beta, M, sigma, label, ell, j0)

    if k0 <= (1.0 - eps) * ell:
        return (make(math.floor((1.0 - eps ** 3) * k0), "case3-sub1-w1"),
                make(first_past(j0, xi), "case3-sub1-w2"))
    if k0 >= (1.0 + eps) * ell:
        return (make(ell + 1, "case3-sub2-w1"),
                make(ell // 2, "case3-sub2-w2"))
    return (make(math.floor((1.0 - eps) * min(k0, ell)), "case3-sub3-w1"),
            make(math.ceil((1.0 + eps) * max(k0 + xi, ell + 1)), "case3-sub3-w2"))


def _bounded_tree(sample, constants, f, g, alpha, beta, sigma):
    eps, xi = constants.epsilon, constants.xi
    qk = alpha.q(sample.k)
    m = first_crossing(sample.x, sample.x2, alpha, 2 * qk, sigma)
    if m is None:
        raise CaseFallthrough(f"no x-crossing within {2 * qk} steps")
    bound = math.ceil((1.0 + eps) * (m + 1) / xi) + 2
    ell0 = first_crossing(sample.y, sample.y2, beta, bound, sigma)

    def make(M, label):
        return _window(sample, constants, f, g, alpha, beta, M, sigma, label, m, ell0)

    if ell0 is not None and ell0 <= (1.0 - eps) * m / xi:
        return (make(math.floor((1.0 - eps ** 3) * xi * ell0), "caseA-w1"),
                make(first_past(ell0, xi), "caseA-w2"))
    if ell0 is None or ell0 >= (1.0 + eps) * m / xi:
        return (make(m + 1, "caseB-w1"), make(m // 2, "caseB-w2"))
    return (make(math.floor((1.0 - eps) * min(xi * ell0, m)), "caseC-w1"),
            make(math.ceil((1.0 + eps) * max(xi * (ell0 + 1), m + 1)), "caseC-w2"))


def find_window(sample, constants, f, g, alpha, beta, reverse=False):
    """Candidate windows for a sample, one or two depending on the case."""
    if sample.degenerate:
        return degenerate_window(sample, constants, f, alpha)
    sigma0 = -1 if reverse else 1
    if constants.branch is Branch.BOUNDED:
        return _bounded_tree(sample, constants, f, g, alpha, beta, sigma0)
    return _unbounded_tree(sample, constants, f, g, alpha, beta, sigma0)


def difference_sums(roof, freq, a, a2, length, sigma):
    """D[n] = roof^(sigma n)(a) - roof^(sigma n)(a2) for n = 0..length."""
    return (birkhoff_sums(roof, freq, a, length, sigma)
            - birkhoff_sums(roof, freq, a2, length, sigma))


def residuals(sample, window, f, g, alpha, beta, xi):
    """Max over n in [M', M'+L'] of |D_f(n) - p| and of |D_g([n/xi]) - q|."""
    lo, hi = window.M, window.M + window.L
    Df = difference_sums(f, alpha, sample.x, sample.x2, hi, window.sigma)
    res_f = float(np.abs(Df[lo:hi + 1] - window.p).max())
    idx = np.floor(np.arange(lo, hi + 1) / xi).astype(np.int64)
    if sample.degenerate:
        res_g = abs(window.q)
    else:
        Dg = difference_sums(g, beta, sample.y, sample.y2, int(idx.max()), window.sigma)
        res_g = float(np.abs(Dg[idx] - window.q).max())
    return res_f, res_g


def verify_window(sample, window, f, g, alpha, beta, constants):
    """Residuals below eps^2, L'/M' >= eps^3 and (p, q) in P."""
    eps = constants.epsilon
    in_P = constants.in_P(window.p, window.q)
    if window.M < 1:
        return WindowCheck(window, math.inf, math.inf, in_P, False, eps, "short-window")
    length_ok = window.L / window.M >= eps ** 3
    res_f, res_g = residuals(sample, window, f, g, alpha, beta, constants.xi)
    failure = None
    if not in_P:
        failure = "not-in-P"
    elif not length_ok:
        failure = "short-window"
    elif not res_f < eps * eps:
        failure = "residual-f"
    elif not res_g < eps * eps:
        failure = "residual-g"
    return WindowCheck(window, res_f, res_g, in_P, length_ok, eps, failure)


def best_window(checks):
    """Passing candidate in P with the smallest combined residual, else the
    candidate that got furthest."""
    passing = [c for c in checks if c.passed]
    if passing:
        return min(passing, key=lambda c: c.combined)
    in_p = [c for c in checks if c.in_P]
    return min(in_p or checks, key=lambda c: c.combined)


def _mp_differences(roof, freq, a, a2, length, sigma, bits):
    """D[n] for n = 0..length summed term by term at the given precision."""
    with mpmath.workprec(bits):
        alpha = freq.value(bits + 32)
        step = sigma * alpha
        a, a2 = mpmath.mpf(a), mpmath.mpf(a2)
        two_pi = 2 * mpmath.pi
        jump, const = mpmath.mpf(roof.jump), mpmath.mpf(roof.constant)

        def value(z):
            z = mpmath.frac(z)
            v = jump * z + const
            for h in roof.harmonics:
                t = two_pi * h.k * z
                v += h.cos * mpmath.cos(t) + h.sin * mpmath.sin(t)
            return v

        out = [mpmath.mpf(0)]
        acc = mpmath.mpf(0)
        start = 0 if sigma == 1 else 1
        for i in range(start, start + length):
            acc += value(a + i * step) - value(a2 + i * step)
            out.append(sigma * acc)
        return out


def reverify_window(sample, window, f, g, alpha, beta, constants, bits=REVERIFY_BITS):
    """Recompute both residuals from scratch at high precision; returns
    (residual_f, residual_g, largest gap to the float residuals)."""
    lo, hi = window.M, window.M + window.L
    Df = _mp_differences(f, alpha, sample.x, sample.x2, hi, window.sigma, bits)
    res_f = max(abs(Df[n] - window.p) for n in range(lo, hi + 1))
    idx = [math.floor(n / constants.xi) for n in range(lo, hi + 1)]
    if sample.degenerate:
        res_g = abs(mpmath.mpf(window.q))
    else:
        Dg = _mp_differences(g, beta, sample.y, sample.y2, max(idx), window.sigma, bits)
        res_g = max(abs(Dg[j] - window.q) for j in idx)
    float_f, float_g = residuals(sample, window, f, g, alpha, beta, constants.xi)
    gap = max(abs(float(res_f) - float_f), abs(float(res_g) - float_g))
    return float(res_f), float(res_g), gap
