"""Product-orbit correlation statistics for pairs of special flows.

Numbers from this module are evidence about joinings, never a certificate.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from rigidity_lab.dynamics.roof import RoofFunction
from rigidity_lab.dynamics.special_flow import FlowPoint, orbit_states, sample_points

log = logging.getLogger(__name__)

EVIDENCE_BANNER = "evidence, not proof"
QUADRATURE_POINTS = 1 << 14
# grid points evaluated per orbit_states call
TIME_BLOCK = 1 << 20


@dataclass(frozen=True)
class Observable:
    """u(x) * s**power on the region under a roof, u a trigonometric polynomial."""

    base: RoofFunction
    power: int = 0
    label: str = ""

    def __post_init__(self):
        if self.base.jump != 0.0:
            raise ValueError("observables use smooth base functions")
        if self.power < 0:
            raise ValueError("power must be non-negative")

    @classmethod
    def constant(cls, value=1.0):
        return cls(RoofFunction.constant_roof(value), 0, f"{value:g}")

    @classmethod
    def cosine(cls, k=1):
        return cls(RoofFunction.make(0.0, 0.0, {k: (1.0, 0.0)}), 0, f"cos(2pi {k}x)")

    def values(self, xs, ss):
        out = self.base.eval_many(xs)
        return out * ss ** self.power if self.power else out

    @property
    def sup_on(self):
        """Sup of |u|, to be multiplied by the roof's sup to the power."""
        return abs(self.base.constant) + sum(h.amplitude for h in self.base.harmonics)

    def bound(self, roof):
        return self.sup_on * roof.sup_bound ** self.power

    def describe(self):
        return self.label or str(self.base)

    def moment(self, roof, order=1):
        """Quadrature of obs**order against the normalized measure under the roof."""
        x = (np.arange(QUADRATURE_POINTS) + 0.5) / QUADRATURE_POINTS
        top = roof.eval_many(x)
        u = self.base.eval_many(x) ** order
        p = self.power * order
        column = top ** (p + 1) / (p + 1)
        return float(np.mean(u * column) / roof.mean)

    def mean(self, roof):
        return self.moment(roof, 1)


@dataclass(frozen=True)
class CorrelationRow:
    start: int
    joint: float
    marginal_a: float
    marginal_b: float
    gap: float


@dataclass(frozen=True)
class CorrelationReport:
    horizon: float
    samples: int
    observable_a: str
    observable_b: str
    joint: float
    product: float
    gap: float
    stderr: float
    rows: tuple
    control: float | None = None
    diagonal: bool = False
    banner: str = EVIDENCE_BANNER

    def summary(self):
        items = [
            ("horizon", f"{self.horizon:g}"),
            ("starts", str(self.samples)),
            ("observable A", self.observable_a),
            ("observable B", self.observable_b),
            ("joint", f"{self.joint:.6g}"),
            ("product", f"{self.product:.6g}"),
            ("gap", f"{self.gap:.3g} ± {self.stderr:.2g}"),
        ]
        if self.control is not None:
            items.append(("quadrature var", f"{self.control:.6g}"))
        return items


def _time_average(flow, point, obs, times, centre=0.0, square=False):
    """Grid averages of obs (optionally centred and squared) along an orbit."""
    total = 0.0
    for lo in range(0, times.size, TIME_BLOCK):
        chunk = times[lo:lo + TIME_BLOCK]
        xs, ss, _ = orbit_states(flow, point, chunk)
        v = obs.values(xs, ss) - centre
        total += float(np.sum(v * v if square else v))
    return total / times.size


def _joint_average(flow_a, za, obs_a, flow_b, zb, obs_b, times):
    joint = marg_a = marg_b = 0.0
    for lo in range(0, times.size, TIME_BLOCK):
        chunk = times[lo:lo + TIME_BLOCK]
        xa, sa, _ = orbit_states(flow_a, za, chunk)
        xb, sb, _ = orbit_states(flow_b, zb, chunk)
        va = obs_a.values(xa, sa)
        vb = obs_b.values(xb, sb)
        joint += float(np.sum(va * vb))
        marg_a += float(np.sum(va))
        marg_b += float(np.sum(vb))
    n = times.size
    return joint / n, marg_a / n, marg_b / n


def _grid(T, step):
    """Midpoints of a uniform partition of [0, T] with spacing <= step."""
    k = max(1, int(math.ceil(T / step)))
    return (np.arange(k) + 0.5) * (T / k)


def _stderr(values):
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1) / math.sqrt(len(values)))


def product_birkhoff_correlation(flow_a, flow_b, obs_a, obs_b, T, samples, seed):
    """Joint time averages of obs_a(T_t z) obs_b(S_t w) over seeded starts."""
    if T <= 0 or samples <= 0:
        raise ValueError("need T > 0 and at least one start")
    mean_a = obs_a.mean(flow_a.roof)
    mean_b = obs_b.mean(flow_b.roof)
    times = _grid(T, min(flow_a.roof.inf_bound, flow_b.roof.inf_bound) / 20.0)
    rows = []
    for i, child in enumerate(np.random.SeedSequence(seed).spawn(samples)):
        rng = np.random.default_rng(child)
        xa, sa = sample_points(flow_a, 1, rng)
        xb, sb = sample_points(flow_b, 1, rng)
        za = FlowPoint(float(xa[0]), float(sa[0]))
        zb = FlowPoint(float(xb[0]), float(sb[0]))
        joint, ma, mb = _joint_average(flow_a, za, obs_a, flow_b, zb, obs_b, times)
        rows.append(CorrelationRow(i, joint, ma, mb, joint - mean_a * mean_b))
    joints = [r.joint for r in rows]
    gaps = [r.gap for r in rows]
    report = CorrelationReport(
        horizon=T,
        samples=samples,
        observable_a=obs_a.describe(),
        observable_b=obs_b.describe(),
        joint=float(np.mean(joints)),
        product=mean_a * mean_b,
        gap=float(np.mean(gaps)),
        stderr=_stderr(gaps),
        rows=tuple(rows),
    )
    log.info("Product correlation gap %.3g ± %.2g (%s)", report.gap, report.stderr, EVIDENCE_BANNER)
    return report


def self_joining_control(flow, obs, T, samples, seed):
    """Diagonal joining: orbit average of (obs - mean)^2 along one orbit."""
    if T <= 0 or samples <= 0:
        raise ValueError("need T > 0 and at least one start")
    mean = obs.mean(flow.roof)
    variance = obs.moment(flow.roof, 2) - mean * mean
    times = _grid(T, flow.roof.inf_bound / 20.0)
    rows = []
    for i, child in enumerate(np.random.SeedSequence(seed).spawn(samples)):
        rng = np.random.default_rng(child)
        xs, ss = sample_points(flow, 1, rng)
        z = FlowPoint(float(xs[0]), float(ss[0]))
        stat = _time_average(flow, z, obs, times, centre=mean, square=True)
        marg = _time_average(flow, z, obs, times)
        rows.append(CorrelationRow(i, stat, marg, marg, stat))
    stats = [r.joint for r in rows]
    return CorrelationReport(
        horizon=T,
        samples=samples,
        observable_a=obs.describe(),
        observable_b=obs.describe(),
        joint=float(np.mean(stats)),
        product=0.0,
        gap=float(np.mean(stats)),
        stderr=_stderr(stats),
        rows=tuple(rows),
        control=variance,
        diagonal=True,
    )
