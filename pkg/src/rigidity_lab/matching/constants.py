"""Proof constants for the matching-window engine."""

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from rigidity_lab.arith.diophantine import bounded_type_constant, classify_type
from rigidity_lab.dynamics.roof import as_rotation, birkhoff_sums
from rigidity_lab.errors import EpsilonTooLarge, ZeroJump

log = logging.getLogger(__name__)

DESK_C = 0.05
TYPE_HORIZON = 30
TYPE_BOUND = 10
# cocycle horizon and starting points for the smooth-difference calibration
CALIBRATION_HORIZON = 2000
CALIBRATION_STARTS = 32


class Mode(str, Enum):
    FAITHFUL = "paper-faithful"
    DESK = "desk-scale"


class Branch(str, Enum):
    UNBOUNDED = "unbounded"
    BOUNDED = "bounded"


@dataclass(frozen=True)
class ShiftSet:
    """P = {(p, q): max(|p|, |q|) <= max_shift, |p - q| >= separation}."""

    max_shift: float
    separation: float

    def contains(self, p, q):
        return max(abs(p), abs(q)) <= self.max_shift and abs(p - q) >= self.separation

    __contains__ = lambda self, pq: self.contains(*pq)  # noqa: E731


@dataclass(frozen=True)
class ProofConstants:
    epsilon: float
    xi: float
    Delta: float
    c: float
    c_derived: float
    kappa: float
    delta_eps: float
    delta: float | None
    n0: int | None
    P: ShiftSet
    mode: Mode
    branch: Branch
    a0: float | None
    A_f: float
    A_g: float
    N: int
    g_inf: float
    g_sup: float
    epsilon_cap: float

    def window_length(self, M):
        """L' = max(1, ceil(eps^3 M'))."""
        return max(1, math.ceil(self.epsilon ** 3 * M))

    def in_P(self, p, q):
        return self.P.contains(p, q)

    def summary(self):
        return [
            ("mode", self.mode.value),
            ("branch", self.branch.value),
            ("epsilon", f"{self.epsilon:g}"),
            ("xi", f"{self.xi:.6g}"),
            ("Delta", f"{self.Delta:.6g}"),
            ("c", f"{self.c:.6g}"),
            ("c (derived)", f"{self.c_derived:.6g}"),
            ("kappa", f"{self.kappa:.6g}"),
            ("delta_eps", f"{self.delta_eps:.6g}"),
            ("delta", "n/a" if self.delta is None else f"{self.delta:.6g}"),
            ("n0", "n/a" if self.n0 is None else str(self.n0)),
            ("P", f"max {self.P.max_shift:g}, sep {self.P.separation:.3g}"),
            ("a0", "n/a" if self.a0 is None else f"{self.a0:.6g}"),
        ]


def cocycle_sup(phi, alpha, horizon=CALIBRATION_HORIZON, starts=CALIBRATION_STARTS, seed=0):
    """Sampled sup over k <= horizon and x of |phi^(k)(x)|."""
    if not phi.harmonics and phi.jump == 0.0 and phi.constant == 0.0:
        return 0.0
    rot = as_rotation(alpha)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for x in rng.random(starts):
        sums = birkhoff_sums(phi, rot, float(x), horizon)
        worst = max(worst, float(np.abs(sums).max()))
    return worst


def calibrate_delta_eps(f, g, alpha, beta, eps):
    """Radius below which smooth-part differences stay below eps^3/40 per unit drift."""
    sup = max(cocycle_sup(f.derivative(), alpha), cocycle_sup(g.derivative(), beta))
    if sup == 0.0:
        return 1.0
    return eps ** 3 / (40.0 * sup)


def derive_constants(f, g, alpha, beta, eps, N, mode=Mode.DESK, branch=Branch.UNBOUNDED, c=None):
    """All constants of a matching run, in paper-faithful or desk-scale mode."""
    mode = Mode(mode)
    branch = Branch(branch)
    A_f, A_g = f.jump, g.jump
    if A_f == 0.0 or A_g == 0.0:
        raise ZeroJump("matching needs nonzero jumps on both roofs")
    if A_f < 0 or A_g < 0:
        raise ValueError("normalize roofs to positive jumps before deriving constants")
    if eps <= 0:
        raise ValueError("epsilon must be positive")

    xi = g.mean / f.mean
    Delta = 1000.0 * max(xi, A_f / A_g, A_g / A_f, 1.0 / A_f, 1.0 / A_g)
    terms = [A_f, A_g, abs(A_f - A_g), xi, 1.0 / xi]
    a0 = None
    if branch is Branch.BOUNDED:
        a0 = 10.0 * max(bounded_type_constant(alpha, TYPE_HORIZON),
                        bounded_type_constant(beta, TYPE_HORIZON))
        terms.append(1.0 / a0)
    c_derived = min(terms) / (100.0 * Delta ** 2)
    if c_derived == 0.0:
        log.warning("Equal jumps give derived c = 0")

    for name, freq in (("alpha", alpha), ("beta", beta)):
        verdict = classify_type(freq, TYPE_HORIZON, TYPE_BOUND)
        if branch is Branch.BOUNDED and not verdict.is_bounded:
            log.warning("Bounded branch requested but %s shows %s", name, verdict)
        if branch is Branch.UNBOUNDED and name == "alpha" and verdict.is_bounded:
            log.warning("Unbounded branch requested but alpha is %s", verdict)

    if mode is Mode.FAITHFUL:
        c_used = c_derived
    else:
        c_used = DESK_C if c is None else float(c)
        log.info("Desk-scale c = %g overrides derived value %.3g", c_used, c_derived)

    g_inf, g_sup = g.inf_bound, g.sup_bound
    cap = min(g_inf / 4.0, A_g / 72.0, g_sup * A_g / 72.0, c_used)
    if not eps < cap:
        if mode is Mode.FAITHFUL:
            raise EpsilonTooLarge(f"epsilon {eps} is not below the cap {cap:.3g}")
        log.warning("Epsilon %g exceeds the cap %.3g; continuing at desk scale", eps, cap)

    delta_eps = calibrate_delta_eps(f, g, alpha, beta, eps)
    if g_inf > 0:
        threshold = max(12.0 * N / g_inf, (N / g_inf) ** 2)
        n0 = beta.index_exceeding(threshold)
        delta = min(delta_eps, eps / 10.0, eps / (20.0 * A_g), 12.0 * eps / (A_g * beta.q(n0)))
    else:
        log.warning("Roof g has no positive infimum; n0 and delta are undefined")
        n0, delta = None, None

    return ProofConstants(
        epsilon=eps,
        xi=xi,
        Delta=Delta,
        c=c_used,
        c_derived=c_derived,
        kappa=c_used * eps ** 3,
        delta_eps=delta_eps,
        delta=delta,
        n0=n0,
        P=ShiftSet(10.0 * max(A_f, A_g), c_used ** 2),
        mode=mode,
        branch=branch,
        a0=a0,
        A_f=A_f,
        A_g=A_g,
        N=N,
        g_inf=g_inf,
        g_sup=g_sup,
        epsilon_cap=cap,
    )
