"""Criterion audit: draw matched samples, find and verify windows, lift them
to the flows and aggregate success rates with a failure taxonomy."""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from functools import partial

import numpy as np

from rigidity_lab.arith.circle import circle_distance, frac
from rigidity_lab.dynamics.special_flow import (
    BadSetSpec,
    FlowParams,
    FlowPoint,
    good_times_window,
    intersect_intervals,
    orbit_states,
    suspension_distance,
    time_grid,
)
from rigidity_lab.dynamics.roof import birkhoff_sums
from rigidity_lab.errors import CaseFallthrough, ScaleUnavailable
from rigidity_lab.matching.constants import Branch, derive_constants
from rigidity_lab.matching.sets import admissible_scales, build_Ek, build_Z
from rigidity_lab.matching.windows import (
    MatchSample,
    WindowCheck,
    best_window,
    find_window,
    reverify_window,
    verify_window,
)
from rigidity_lab.runner import TrialRunner

log = logging.getLogger(__name__)

FAILURE_KINDS = (
    "not-in-P", "residual-f", "residual-g", "short-window",
    "lift-distance", "lift-measure", "lift-ratio", "fallthrough", "error",
)
COUPLINGS = ("independent", "diagonal")
# preferred window scales for the default E_k
DESK_Q_RANGE = (1_000, 10_000)
# fallback search stays inside the exact orbit-index range
MAX_SCALE_Q = 50_000_000
PAIR_ATTEMPTS = 200
REVERIFY_TOLERANCE = 1e-6


@dataclass(frozen=True)
class LiftRecord:
    M: float
    L: float
    U: tuple
    ratio: float
    good_measure: float
    max_distance_f: float
    max_distance_g: float
    grid_points: int
    interval_bound: float
    failure: str | None = None
    window_length: int | None = None

    @property
    def passed(self):
        return self.failure is None


@dataclass(frozen=True)
class Attempt:
    """One direction of a trial: every candidate window checked, the one
    kept and its lift."""

    direction: str
    candidates: tuple = ()
    check: WindowCheck | None = None
    lift: LiftRecord | None = None
    failure: str | None = None

    @property
    def success(self):
        return self.failure is None

    @property
    def pair_guarantee(self):
        """Two-window cases must put at least one candidate in P."""
        return len(self.candidates) < 2 or any(c.in_P for c in self.candidates)


@dataclass(frozen=True)
class TrialResult:
    index: int
    sample: MatchSample | None
    check: object = None
    lift: LiftRecord | None = None
    direction: str = "forward"
    failure: str | None = None
    reverify_gap: float | None = None
    message: str = ""
    attempts: tuple = ()

    @property
    def success(self):
        return self.failure is None


@dataclass
class CriterionReport:
    trials: int
    results: list = field(default_factory=list)
    constants: object = None
    k: int | None = None

    @property
    def successes(self):
        return sum(1 for r in self.results if r.success)

    @property
    def window_successes(self):
        return sum(1 for r in self.results
                   if getattr(r, "check", None) is not None and r.check.passed)

    @property
    def lift_successes(self):
        return sum(1 for r in self.results if getattr(r, "lift", None) is not None and r.lift.passed)

    @property
    def success_rate(self):
        return self.successes / self.trials if self.trials else 0.0

    @property
    def window_rate(self):
        return self.window_successes / self.trials if self.trials else 0.0

    @property
    def lift_rate(self):
        return self.lift_successes / self.trials if self.trials else 0.0

    @property
    def failures(self):
        return Counter(r.failure for r in self.results if not r.success)

    def _attempts(self, direction):
        for r in self.results:
            for a in getattr(r, "attempts", ()):
                if a.direction == direction:
                    yield a

    @property
    def forward_successes(self):
        return sum(1 for a in self._attempts("forward") if a.success)

    @property
    def backward_successes(self):
        return sum(1 for a in self._attempts("backward") if a.success)

    @property
    def pair_guarantee_breaks(self):
        """Trial indices with a two-window attempt that has no candidate in P."""
        return [r.index for r in self.results
                if any(not a.pair_guarantee for a in getattr(r, "attempts", ()))]

    @property
    def max_reverify_gap(self):
        gaps = [r.reverify_gap for r in self.results if getattr(r, "reverify_gap", None) is not None]
        return max(gaps) if gaps else None


@dataclass(frozen=True)
class MatchContext:
    """Everything a worker needs to run one trial."""

    f: object
    g: object
    alpha: object
    beta: object
    constants: object
    ek: object
    z: object
    reverify: bool = False
    coupling: str = "independent"

    @property
    def flow_f(self):
        return FlowParams(self.alpha, self.f)

    @property
    def flow_g(self):
        return FlowParams(self.beta, self.g)


def default_scale(alpha, constants):
    """First admissible E_k scale with q_k at desk size, else the first at all."""
    lo, hi = DESK_Q_RANGE
    scales = admissible_scales(alpha, constants, lo, hi)
    if not scales:
        scales = admissible_scales(alpha, constants, q_max=MAX_SCALE_Q)
    if not scales:
        raise ScaleUnavailable(f"no admissible scale with c = {constants.c:g}")
    return scales[0]


def draw_sample(ctx, rng):
    """(x, s) from E_k, then the g-side pair.

    The independent coupling draws (y, r) from Z and a delta-close partner
    (y2, r2) in Z. The diagonal coupling reuses the f-side pair, y = x,
    y2 = x2 and r = r2 = s.
    """
    const = ctx.constants
    delta = const.delta
    scale = 2 if const.branch is Branch.BOUNDED else 6
    e = ctx.ek.sample(rng)
    x2 = ctx.ek.partner(e.x)
    if ctx.coupling == "diagonal":
        n = ctx.beta.bracket_index(circle_distance(e.x, x2), scale)
        return MatchSample(e.x, x2, e.s, e.x, x2, e.s, e.s, ctx.ek.k, n)
    for _ in range(PAIR_ATTEMPTS):
        ys, rs = ctx.z.sample(rng, 1)
        y, r = float(ys[0]), float(rs[0])
        for _ in range(PAIR_ATTEMPTS):
            dy = delta * rng.uniform(0.05, 0.5) * (1 if rng.random() < 0.5 else -1)
            y2 = frac(y + dy)
            r2 = r + delta * rng.uniform(-0.45, 0.45)
            if ctx.z.contains(y2, r2):
                n = ctx.beta.bracket_index(abs(dy), scale)
                return MatchSample(e.x, x2, e.s, y, y2, r, r2, ctx.ek.k, n)
    raise ScaleUnavailable("could not place a delta-close pair inside Z")


def _lap_window(roof, freq, point, M, L, sigma):
    """Times covered by whole laps whose start and end indices lie in
    sigma * [M, M + L]."""
    if sigma == 1:
        S = birkhoff_sums(roof, freq, point.x, M + L, 1)
        return S[M] - point.s, S[M + L] - point.s, abs(S[M])
    S = birkhoff_sums(roof, freq, point.x, M + L, -1)
    return S[M + L] - point.s, S[M] - point.s, abs(S[M])


def lift_to_continuous(sample, window, ctx):
    """Check the flows stay eps-close on the good times of the window.

    Bad times are the B(eps) jump collars of both orbits; distances are
    taken in the suspension, so a roof crossing a hair apart costs nothing.
    """
    const = ctx.constants
    eps, xi = const.epsilon, const.xi
    f, g = ctx.f, ctx.g
    pf, pg = ctx.flow_f, ctx.flow_g
    z1, z2 = FlowPoint(sample.x, sample.s), FlowPoint(sample.x2, sample.s)
    w1, w2 = FlowPoint(sample.y, sample.r), FlowPoint(sample.y2, sample.r2)
    sigma = window.sigma

    fa, fb, f_mag = _lap_window(f, ctx.alpha, z1, window.M, window.L, sigma)
    G1, G2 = window.g_indices(xi)
    ga, gb, g_mag = _lap_window(g, ctx.beta, w1, G1, max(G2 - G1, 0), sigma)
    M = max(f_mag, g_mag)
    a, b = max(fa, ga), min(fb, gb)
    L = max(b - a, 0.0)
    ratio = L / M if M > 0 else math.inf

    def record(failure, U=(), good=0.0, df=0.0, dg=0.0, pts=0, bound=0.0):
        return LiftRecord(M, L, U, ratio, good, df, dg, pts, bound, failure, window.L)

    if L <= 0 or ratio < const.kappa:
        return record("lift-ratio")

    U = intersect_intervals(good_times_window(pf, z1, a, b, BadSetSpec.for_epsilon(eps, f)),
                            good_times_window(pg, w1, a, b, BadSetSpec.for_epsilon(eps, g)))
    good = math.fsum(v - u for u, v in U)
    bound = L / f.inf_bound + L / g.inf_bound + 3
    if good < (1.0 - eps) * L or len(U) > bound:
        return record("lift-measure", U, good, bound=bound)

    grid = time_grid(U, min(f.inf_bound, g.inf_bound) / 20.0)
    d_f = suspension_distance(pf, orbit_states(pf, z1, grid), orbit_states(pf, z2, grid - window.p))
    d_g = suspension_distance(pg, orbit_states(pg, w1, grid), orbit_states(pg, w2, grid - window.q))
    df, dg = float(d_f.max()), float(d_g.max())
    failure = None if df < eps and dg < eps else "lift-distance"
    return record(failure, U, good, df, dg, int(grid.size), bound)


def lift_window(sample, check, ctx):
    """Lift a verified window, doubling L' up to M' while the common time
    window is too short. Every longer window is verified again; returns the
    check actually lifted and its LiftRecord."""
    const = ctx.constants
    lift = lift_to_continuous(sample, check.window, ctx)
    while lift.failure == "lift-ratio" and 2 * check.window.L <= check.window.M:
        window = replace(check.window, L=2 * check.window.L)
        longer = verify_window(sample, window, ctx.f, ctx.g, ctx.alpha, ctx.beta, const)
        if not longer.passed:
            break
        check = longer
        lift = lift_to_continuous(sample, window, ctx)
    return check, lift


def _attempt(ctx, sample, reverse):
    """One direction: window search, verification of every candidate, lift."""
    direction = "backward" if reverse else "forward"
    const = ctx.constants
    try:
        windows = find_window(sample, const, ctx.f, ctx.g, ctx.alpha, ctx.beta, reverse=reverse)
    except CaseFallthrough as e:
        log.debug("Fallthrough (%s): %s", direction, e)
        return Attempt(direction, failure="fallthrough")
    checks = tuple(verify_window(sample, w, ctx.f, ctx.g, ctx.alpha, ctx.beta, const)
                   for w in windows)
    check = best_window(checks)
    if not check.passed:
        return Attempt(direction, checks, check, None, check.failure)
    check, lift = lift_window(sample, check, ctx)
    return Attempt(direction, checks, check, lift, lift.failure)


def run_trial(ctx, index, seed):
    """A single seeded trial. Both trees run; the forward attempt is kept
    when it succeeds, the backward one otherwise."""
    rng = np.random.default_rng(seed)
    sample = draw_sample(ctx, rng)
    forward = _attempt(ctx, sample, reverse=False)
    backward = _attempt(ctx, sample, reverse=True)
    chosen = forward if forward.success or not backward.success else backward
    gap = None
    if chosen.success and ctx.reverify:
        _, _, gap = reverify_window(sample, chosen.check.window, ctx.f, ctx.g,
                                    ctx.alpha, ctx.beta, ctx.constants)
        if gap > REVERIFY_TOLERANCE:
            log.warning("Trial %d: high-precision residuals differ by %.3g", index, gap)
    return TrialResult(index, sample, chosen.check, chosen.lift, chosen.direction,
                       chosen.failure, gap, attempts=(forward, backward))


def build_context(f, g, alpha, beta, eps, N, mode, branch, c=None, k=None, reverify=False,
                  coupling="independent"):
    if coupling not in COUPLINGS:
        raise ValueError(f"unknown coupling {coupling!r}; use one of {COUPLINGS}")
    const = derive_constants(f, g, alpha, beta, eps, N, mode, branch, c)
    if k is None:
        k = default_scale(alpha, const)
    ek = build_Ek(alpha, f, k, const)
    z = build_Z(beta, g, const)
    return MatchContext(f, g, alpha, beta, const, ek, z, reverify, coupling)


def criterion_audit(f, g, alpha, beta, eps, N, trials, seed, mode="desk-scale",
                    branch="unbounded", c=None, k=None, workers=1, reverify=False,
                    context=None, coupling="independent"):
    """Run trials-many matching trials and aggregate them."""
    if trials <= 0:
        return CriterionReport(0)
    ctx = context or build_context(f, g, alpha, beta, eps, N, mode, branch, c, k, reverify,
                                   coupling)
    runner = TrialRunner(partial(run_trial, ctx), workers)
    results = runner.run(trials, seed)
    report = CriterionReport(trials, results, ctx.constants, ctx.ek.k)
    log.info("Criterion audit: %d/%d trials matched", report.successes, trials)
    breaks = report.pair_guarantee_breaks
    if breaks:
        log.warning("Two-window cases with no candidate in P: trials %s", breaks)
    return report
