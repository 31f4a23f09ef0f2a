"""Cohomological equation over a rotation and the equal/unequal jump dichotomy.

Transfer functions solve phi = xi - xi o R_alpha, so that
sum_{i<n} phi(x + i alpha) = xi(x) - xi(x + n alpha).
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from rigidity_lab.arith.diophantine import ContinuedFraction, dc_check
from rigidity_lab.dynamics.roof import Harmonic, RoofFunction, as_rotation, birkhoff_sums
from rigidity_lab.errors import (
    NonzeroJump,
    NonzeroMean,
    RigidityLabError,
    RoofNotPositive,
    SmallDivisorUnderflow,
)

log = logging.getLogger(__name__)

DIVISOR_BITS = 128
RESIDUAL_GRID = 10_000
MEAN_TOLERANCE = 1e-12
DC_TAU = 2.5
DC_C = 1e-3
DC_HORIZON = 30


def _alpha_mp(alpha, bits):
    if isinstance(alpha, ContinuedFraction):
        return alpha.value(bits)
    if isinstance(alpha, Fraction):
        return mpmath.mpf(alpha.numerator) / alpha.denominator
    return mpmath.mpf(alpha)


def small_divisor_profile(alpha, max_harmonic, bits=DIVISOR_BITS):
    """[(k, |1 - e^(2 pi i k alpha)|, k is a denominator)] for 1 <= k <= max_harmonic."""
    if max_harmonic <= 0:
        return []
    qs = set()
    if isinstance(alpha, ContinuedFraction):
        n = 1
        while alpha.q(n) <= max_harmonic:
            qs.add(alpha.q(n))
            n += 1
    out = []
    with mpmath.workprec(bits):
        a = _alpha_mp(alpha, bits)
        for k in range(1, max_harmonic + 1):
            if isinstance(alpha, Fraction) and (k * alpha).denominator == 1:
                out.append((k, 0.0, k in qs))
                continue
            d = 2 * abs(mpmath.sin(mpmath.pi * k * a))
            out.append((k, float(d), k in qs))
    return out


@dataclass(frozen=True)
class TransferFunction:
    harmonics: tuple
    residual: float
    tail: float
    min_divisor: float
    max_harmonic: int

    def as_roof(self):
        return RoofFunction(0.0, 0.0, self.harmonics)

    def evaluate(self, x):
        """xi at a point or an array of points."""
        if isinstance(x, np.ndarray):
            return self.as_roof().eval_many(x)
        return self.as_roof().eval(x)

    def to_text(self):
        terms = "; ".join(f"k:{h.k}={h.cos!r},{h.sin!r}" for h in self.harmonics) or "0"
        return f"xi[{terms}] residual={self.residual:.3g} tail={self.tail:.3g}"


def fourier_coboundary_solve(phi, alpha, max_harmonic, bits=DIVISOR_BITS):
    """Mean-zero xi with xi(x) - xi(x + alpha) = phi(x) up to harmonic max_harmonic."""
    if phi.jump != 0.0:
        raise NonzeroJump(f"roof has jump {phi.jump}; only smooth differences can be solved")
    if abs(phi.mean) > MEAN_TOLERANCE:
        raise NonzeroMean(f"roof has mean {phi.mean:.3g}")
    kept = [h for h in phi.harmonics if h.k <= max_harmonic]
    tail = math.fsum(h.amplitude for h in phi.harmonics if h.k > max_harmonic)
    if tail:
        log.info("Dropping harmonics above %d (amplitude sum %.3g)", max_harmonic, tail)

    solved = []
    smallest = math.inf
    with mpmath.workprec(bits):
        a = _alpha_mp(alpha, bits)
        floor = mpmath.mpf(2) ** (-(bits // 2))
        for h in kept:
            e = mpmath.expjpi(2 * h.k * a)
            divisor = 1 - e
            size = abs(divisor)
            # alpha is known to about 2^-bits, so the divisor to about 2 pi k 2^-bits
            if size < max(floor, 64 * mpmath.pi * h.k * mpmath.mpf(2) ** (-bits)):
                raise SmallDivisorUnderflow(
                    f"divisor at k={h.k} is {mpmath.nstr(size, 3)}, below certification"
                )
            smallest = min(smallest, float(size))
            # phi-hat(k) = (a - ib)/2 for a cos + b sin
            coef = mpmath.mpc(h.cos, -h.sin) / 2 / divisor
            solved.append(Harmonic(h.k, float(2 * coef.real), float(-2 * coef.imag)))

    grid = np.arange(RESIDUAL_GRID) / RESIDUAL_GRID
    shift = float(_alpha_mp(alpha, 64))
    xi = RoofFunction(0.0, 0.0, tuple(solved))
    target = RoofFunction(0.0, 0.0, tuple(kept))
    resid = np.abs(xi.eval_many(grid) - xi.eval_many(grid + shift) - target.eval_many(grid))
    residual = float(resid.max()) + tail
    return TransferFunction(tuple(solved), residual, tail, smallest, max_harmonic)


def cocycle_identity_defect(phi, transfer, alpha, n_max=1000, samples=32, seed=0):
    """max |phi^(n)(x) - (xi(x) - xi(x + n alpha))| over sampled x and n <= n_max."""
    rot = as_rotation(alpha)
    xi = transfer.as_roof()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for x in rng.random(samples):
        sums = birkhoff_sums(phi, rot, float(x), n_max)
        ends = np.concatenate([[float(x)], rot.orbit(float(x), 1, n_max + 1)])
        expected = xi.eval(float(x)) - xi.eval_many(ends)
        worst = max(worst, float(np.abs(sums - expected).max()))
    return worst


@dataclass(frozen=True)
class DichotomyVerdict:
    kind: str
    reason: str
    transfer: TransferFunction | None = None
    dc_horizon: int | None = None
    dc_violation: int | None = None

    def to_text(self):
        parts = [f"verdict={self.kind}", f"reason={self.reason}"]
        if self.transfer is not None:
            parts.append(self.transfer.to_text())
        if self.dc_horizon is not None:
            dc = "none" if self.dc_violation is None else str(self.dc_violation)
            parts.append(f"dc_horizon={self.dc_horizon} dc_first_violation={dc}")
        return " | ".join(parts)


def dichotomy(f_psi, f_phi, alpha, max_harmonic, dc_horizon=DC_HORIZON):
    """Cohomologous, disjoint or inconclusive, decided from jumps and means."""
    for name, roof in (("psi", f_psi), ("phi", f_phi)):
        if not roof.inf_bound > 0:
            raise RoofNotPositive(f"roof {name} has no positive infimum")
    a_psi, a_phi = f_psi.jump, f_phi.jump
    if abs(a_psi) != abs(a_phi):
        return DichotomyVerdict("disjoint", f"|A_psi| = {abs(a_psi):g} differs from |A_phi| = {abs(a_phi):g}")
    if a_psi != a_phi:
        return DichotomyVerdict("inconclusive", "jumps have opposite signs")
    if abs(f_psi.mean - f_phi.mean) > MEAN_TOLERANCE:
        return DichotomyVerdict(
            "inconclusive", f"means differ by {f_psi.mean - f_phi.mean:.3g}"
        )
    diff = f_psi - f_phi
    diff = RoofFunction(0.0, 0.0, diff.harmonics)
    try:
        transfer = fourier_coboundary_solve(diff, alpha, max_harmonic)
    except RigidityLabError as e:
        return DichotomyVerdict("inconclusive", f"solver failed: {e}")
    horizon = violation = None
    if isinstance(alpha, ContinuedFraction):
        horizon = dc_horizon
        violation = dc_check(alpha, DC_TAU, DC_C, dc_horizon).first_violation
    return DichotomyVerdict("cohomologous", "equal jumps and means", transfer, horizon, violation)
