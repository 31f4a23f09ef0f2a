"""The special flow T_t over a rotation under a roof, and its good-time sets."""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from rigidity_lab.arith.circle import circle_distance, frac
from rigidity_lab.arith.summation import CompensatedSum, compensated_prefix_sums
from rigidity_lab.dynamics.roof import as_rotation, birkhoff_sums
from rigidity_lab.errors import FlowInvariantViolation, HorizonOverflow, RoofNotPositive

log = logging.getLogger(__name__)

HORIZON_CAP = 100_000_000
CLAMP_TOLERANCE = 1e-12
LOCATE_CHUNK = 1 << 16
CELLS_PER_BOX = 1024
# process-wide counters of clamped flow outputs
CLAMP_STATS = Counter()

BAD_SET_KINDS = ("jump-collar", "crossing", "mid-strip")
DEFAULT_BAD_SET = "jump-collar"


@dataclass(frozen=True)
class FlowPoint:
    x: float
    s: float

    def __iter__(self):
        return iter((self.x, self.s))


@dataclass(frozen=True)
class FlowParams:
    """Rotation frequency plus a positive roof; sign -1 runs the base backwards."""

    alpha: object
    roof: object
    sign: int = 1
    cap: int = HORIZON_CAP
    mean: float = field(init=False, compare=False)

    def __post_init__(self):
        if not self.roof.inf_bound > 0:
            raise RoofNotPositive(
                f"roof infimum certificate {self.roof.inf_bound:.6g} is not positive"
            )
        object.__setattr__(self, "mean", self.roof.mean)

    @property
    def rotation(self):
        return as_rotation(self.alpha, self.sign)

    def contains(self, point, slack=0.0):
        return -slack <= point.s < self.roof.eval(point.x) + slack


def flow_metric(p1, p2):
    """d((x,s),(y,r)) = ||x - y|| + |s - r|."""
    return circle_distance(p1.x, p2.x) + abs(p1.s - p2.s)


def suspension_distance(params, first, second):
    """Elementwise distance between orbit states (xs, ss, laps) where the roof
    point (x, f(x)) is glued to (x + alpha, 0).

    States one lap apart are also measured along the path through the roof:
    f(x_low) - s_low + ||x_low + alpha - x_high|| + s_high.
    """
    xs, ss, laps = first
    xs2, ss2, laps2 = second
    d = circle_distance(xs, xs2) + np.abs(ss - ss2)
    step = params.rotation.offset(1)
    f = params.roof
    first_low = np.asarray(laps2) == np.asarray(laps) + 1
    if first_low.any():
        via = f.eval_many(xs) - ss + circle_distance(frac(xs + step), xs2) + ss2
        d = np.where(first_low, np.minimum(d, via), d)
    second_low = np.asarray(laps) == np.asarray(laps2) + 1
    if second_low.any():
        via = f.eval_many(xs2) - ss2 + circle_distance(frac(xs2 + step), xs) + ss
        d = np.where(second_low, np.minimum(d, via), d)
    return d


def _locate(params, x, target):
    """(N, F_N) with F_N <= target < F_{N+1}, F the cocycle of the roof at x."""
    rot = params.rotation
    f = params.roof
    acc = CompensatedSum()
    done = 0
    if target >= 0:
        while True:
            need = int((target - acc.value) / f.inf_bound) + 2
            size = min(max(need, 16), LOCATE_CHUNK)
            if done + size > params.cap:
                raise HorizonOverflow(f"hitting count beyond {params.cap}")
            vals = f.eval_many(rot.orbit(x, done, done + size))
            prefix = acc.value + compensated_prefix_sums(vals)
            over = np.nonzero(prefix > target)[0]
            if over.size:
                m = int(over[0])
                n = done + m
                return n, (acc.value if m == 0 else float(prefix[m - 1]))
            acc.extend(vals)
            done += size
    back = rot.reversed()
    while True:
        need = int((acc.value - target) / f.inf_bound) + 2
        size = min(max(need, 16), LOCATE_CHUNK)
        if done + size > params.cap:
            raise HorizonOverflow(f"hitting count beyond {params.cap}")
        vals = f.eval_many(back.orbit(x, done + 1, done + size + 1))
        prefix = acc.value - compensated_prefix_sums(vals)
        under = np.nonzero(prefix <= target)[0]
        if under.size:
            m = int(under[0])
            return -(done + m + 1), float(prefix[m])
        acc.extend(-vals)
        done += size


def hitting_count(params, point, t):
    """The lap index N(x, s, t)."""
    if t == 0:
        return 0
    n, _ = _locate(params, point.x, point.s + t)
    return n


def _settle(params, x, s, n):
    """Clamp rounding-size excursions out of [0, f(x)); abort on larger ones."""
    top = params.roof.eval(x)
    if 0.0 <= s < top:
        return s
    over = -s if s < 0 else s - top
    if over <= CLAMP_TOLERANCE:
        CLAMP_STATS["clamped"] += 1
        log.warning("Clamped flow height %.17g into [0, %.17g) at lap %d", s, top, n)
        return 0.0 if s < 0 else math.nextafter(top, 0.0)
    raise FlowInvariantViolation(
        f"height {s!r} outside [0, {top!r}) by {over:.3g} at lap {n}"
    )


def flow_map(params, point, t):
    """T_t(x, s) = (x + N alpha, s + t - f^(N)(x))."""
    if t == 0:
        return point
    n, fn = _locate(params, point.x, point.s + t)
    x = params.rotation.point(point.x, n)
    s = (point.s + t) - fn
    return FlowPoint(x, _settle(params, x, s, n))


def orbit_states(params, point, times):
    """Vectorized (x, s, N) of T_t(point) for an array of times."""
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        return np.empty(0), np.empty(0), np.empty(0, dtype=np.int64)
    f = params.roof
    rot = params.rotation
    target = point.s + times
    hi = max(float(target.max()), 0.0)
    lo = min(float(target.min()), 0.0)
    nf = int(hi / f.inf_bound) + 2
    nb = int(-lo / f.inf_bound) + 2 if lo < 0 else 0
    if max(nf, nb) > params.cap:
        raise HorizonOverflow(f"hitting count beyond {params.cap}")
    fwd = birkhoff_sums(f, rot, point.x, nf, 1)
    if nb:
        bwd = birkhoff_sums(f, rot, point.x, nb, -1)
        levels = np.concatenate([bwd[::-1], fwd[1:]])
    else:
        levels = fwd
    pos = np.searchsorted(levels, target, side="right") - 1
    laps = pos - nb
    xs = frac(point.x + rot.offsets_at(laps))
    ss = target - levels[pos]
    tops = f.eval_many(xs)
    bad = (ss < 0) | (ss >= tops)
    if bad.any():
        over = np.where(ss < 0, -ss, ss - tops)[bad]
        if over.max() > CLAMP_TOLERANCE:
            raise FlowInvariantViolation(
                f"{int(bad.sum())} orbit heights outside the roof by up to {over.max():.3g}"
            )
        CLAMP_STATS["clamped"] += int(bad.sum())
        log.warning("Clamped %d orbit heights into the roof", int(bad.sum()))
        ss = np.where(ss < 0, 0.0, np.where(ss >= tops, np.nextafter(tops, 0.0), ss))
    return xs, ss, laps


def flow_map_many(params, xs, ss, t):
    """T_t applied to arrays of base points and heights."""
    xs = np.asarray(xs, dtype=float)
    ss = np.asarray(ss, dtype=float)
    if t == 0:
        return xs.copy(), ss.copy()
    f = params.roof
    rot = params.rotation
    steps = int((float(ss.max()) + abs(t)) / f.inf_bound) + 2
    if steps > params.cap:
        raise HorizonOverflow(f"hitting count beyond {params.cap}")
    if t > 0:
        idx = np.arange(steps)
    else:
        idx = -np.arange(1, steps + 1)
    offs = rot.offsets_at(idx)
    out_x = np.empty_like(xs)
    out_s = np.empty_like(ss)
    batch = max(1, (1 << 22) // steps)
    for start in range(0, xs.size, batch):
        stop = min(start + batch, xs.size)
        pts = frac(xs[start:stop, None] + offs[None, :])
        vals = f.eval_many(pts)
        target = ss[start:stop] + t
        if t > 0:
            levels = np.cumsum(vals, axis=1)
            n = (levels <= target[:, None]).sum(axis=1)
            fn = np.where(n > 0, levels[np.arange(n.size), np.maximum(n - 1, 0)], 0.0)
            laps = n
        else:
            levels = -np.cumsum(vals, axis=1)
            n = np.minimum((levels > target[:, None]).sum(axis=1), steps - 1)
            back = target < 0
            fn = np.where(back, levels[np.arange(n.size), n], 0.0)
            laps = np.where(back, -(n + 1), 0)
        nx = frac(xs[start:stop] + rot.offsets_at(laps))
        ns = target - fn
        tops = f.eval_many(nx)
        ns = np.clip(ns, 0.0, np.nextafter(tops, 0.0))
        out_x[start:stop] = nx
        out_s[start:stop] = ns
    return out_x, out_s


@dataclass(frozen=True)
class BadSetSpec:
    """Where orbit comparisons may fail: collars of width `collar` in the fiber,
    over base points within `radius` of the jump (or everywhere for collars
    of the `crossing` kind).

    The default `jump-collar` is B(eps) = {||z|| < eps^2 and (w < eps^2 or
    w > f(z) - eps^2)}, the roof crossings over the discontinuity. `mid-strip`
    is the band between those collars, `crossing` adds a collar to every lap.
    """

    kind: str = DEFAULT_BAD_SET
    radius: float = 0.0
    collar: float = 0.0

    def __post_init__(self):
        if self.kind not in BAD_SET_KINDS:
            raise ValueError(f"unknown bad-set kind {self.kind!r}; use one of {BAD_SET_KINDS}")

    @classmethod
    def for_epsilon(cls, eps, roof, kind=DEFAULT_BAD_SET):
        if kind == "crossing":
            width = density_width(eps, roof)
        else:
            width = eps * eps
        return cls(kind, width, width)


def density_width(eps, roof):
    """Collar and radius that keep the bad-time density below eps^2."""
    return eps * eps * roof.inf_bound / (8.0 * max(1.0, roof.sup_bound))


def shadowing_radius(eps, roof):
    """Largest starting distance for which shadowing is checked."""
    return density_width(eps, roof) / (2.0 * (1.0 + roof.lipschitz))


@dataclass(frozen=True)
class GoodTimeSet:
    start: float
    stop: float
    intervals: tuple
    epsilon: float
    spec: BadSetSpec
    t_eps: float | None
    inf_roof: float

    @property
    def horizon(self):
        return self.stop - self.start

    @property
    def measure(self):
        return math.fsum(b - a for a, b in self.intervals)

    @property
    def count(self):
        return len(self.intervals)

    @property
    def density_ok(self):
        if self.t_eps is None or self.horizon < self.t_eps:
            return True
        return self.measure >= (1.0 - self.epsilon ** 2) * self.horizon

    @property
    def count_ok(self):
        return self.count <= self.horizon / self.inf_roof + 1

    def contains(self, t):
        return any(a <= t <= b for a, b in self.intervals)


def _lap_table(params, point, t0, t1):
    """Laps meeting [t0, t1]: start times, lengths and base points."""
    n0, f0 = _locate(params, point.x, point.s + t0) if t0 != 0 else (0, 0.0)
    n1, _ = _locate(params, point.x, point.s + t1)
    rot = params.rotation
    base = frac(point.x + rot.offsets_at(np.arange(n0, n1 + 1)))
    lengths = params.roof.eval_many(base)
    starts = (f0 - point.s) + np.concatenate([[0.0], compensated_prefix_sums(lengths[:-1])])
    return starts, lengths, base


def good_times_window(params, point, t0, t1, spec):
    """Complement in [t0, t1] of the times the orbit spends in the bad set."""
    if t1 <= t0:
        return ()
    starts, lengths, base = _lap_table(params, point, t0, t1)
    near = circle_distance(base, 0.0) < spec.radius
    if params.roof.jump == 0.0:
        near = np.zeros_like(near)
    eta = spec.collar
    bad_a, bad_b = [], []
    if spec.kind == "crossing":
        bad_a += [starts, starts + lengths - eta, starts[near]]
        bad_b += [starts + eta, starts + lengths, (starts + lengths)[near]]
    elif spec.kind == "jump-collar":
        bad_a += [starts[near], (starts + lengths - eta)[near]]
        bad_b += [(starts + eta)[near], (starts + lengths)[near]]
    else:
        bad_a += [(starts + eta)[near]]
        bad_b += [(starts + lengths - eta)[near]]
    a = np.concatenate(bad_a) if bad_a else np.empty(0)
    b = np.concatenate(bad_b) if bad_b else np.empty(0)
    keep = b > a
    a, b = a[keep], b[keep]
    if a.size == 0:
        return ((float(t0), float(t1)),)
    order = np.argsort(a, kind="stable")
    a, b = a[order], b[order]
    reach = np.maximum.accumulate(b)
    gap_a = np.concatenate([[t0], reach])
    gap_b = np.concatenate([a, [t1]])
    gap_a = np.clip(gap_a, t0, t1)
    gap_b = np.clip(gap_b, t0, t1)
    sel = gap_b > gap_a
    return tuple(zip(gap_a[sel].tolist(), gap_b[sel].tolist()))


def intersect_intervals(first, second):
    """Intersection of two sorted disjoint interval lists."""
    out = []
    i = j = 0
    while i < len(first) and j < len(second):
        a = max(first[i][0], second[j][0])
        b = min(first[i][1], second[j][1])
        if b > a:
            out.append((a, b))
        if first[i][1] < second[j][1]:
            i += 1
        else:
            j += 1
    return tuple(out)


@lru_cache(maxsize=64)
def calibrate_t_eps(params, eps, kind=DEFAULT_BAD_SET, samples=16, seed=0, limit=1e4):
    """Smallest horizon on a doubling ladder where every sampled start has
    good-time density at least 1 - eps^2. None when the ladder runs out."""
    spec = BadSetSpec.for_epsilon(eps, params.roof, kind)
    rng = np.random.default_rng(seed)
    starts = []
    for x in rng.random(samples):
        top = params.roof.eval(float(x))
        starts.append(FlowPoint(float(x), float(rng.random()) * top))
    T = params.roof.inf_bound
    while T <= limit:
        ok = True
        for p in starts:
            good = good_times_window(params, p, 0.0, T, spec)
            if math.fsum(b - a for a, b in good) < (1.0 - eps * eps) * T:
                ok = False
                break
        if ok:
            return T
        T *= 2.0
    return None


def good_times(params, point, T, eps, bad_set=None, calibrate=True):
    """The good-time set U in [0, T] for the given bad set (default: B(eps))."""
    if T <= 0:
        raise ValueError("good_times needs T > 0")
    if bad_set is None or isinstance(bad_set, str):
        spec = BadSetSpec.for_epsilon(eps, params.roof, bad_set or DEFAULT_BAD_SET)
    else:
        spec = bad_set
    intervals = good_times_window(params, point, 0.0, T, spec)
    t_eps = calibrate_t_eps(params, eps, spec.kind) if calibrate else None
    return GoodTimeSet(0.0, T, intervals, eps, spec, t_eps, params.roof.inf_bound)


def time_grid(intervals, step):
    """Grid points with spacing <= step covering each interval."""
    pieces = []
    for a, b in intervals:
        k = max(1, int(math.ceil((b - a) / step)))
        pieces.append(np.linspace(a, b, k + 1))
    return np.concatenate(pieces) if pieces else np.empty(0)


@dataclass(frozen=True)
class ShadowingReport:
    start_distance: float
    radius: float
    max_deviation: float
    violations: tuple
    grid_points: int
    good_measure: float
    horizon: float
    epsilon: float

    @property
    def precondition_ok(self):
        return self.start_distance < self.radius

    @property
    def ok(self):
        return not self.violations


def shadowing_check(params, z, z_prime, T, eps, bad_set=None, step=None):
    """Compare T_t(z) with T_{t + shift}(z') on good times of z.

    shift = f^(N)(x') - f^(N)(x) + (s - s') with N = N(z, t) keeps both orbits
    on the same lap, so away from the bad set they differ only by ||x - x'||.
    The default bad set collars every lap crossing.
    """
    f = params.roof
    spec = bad_set or BadSetSpec.for_epsilon(eps, f, "crossing")
    good = good_times_window(params, z, 0.0, T, spec)
    grid = time_grid(good, step or f.inf_bound / 20.0)
    if grid.size == 0:
        return ShadowingReport(flow_metric(z, z_prime), shadowing_radius(eps, f),
                               0.0, (), 0, 0.0, T, eps)
    xs, ss, laps = orbit_states(params, z, grid)
    max_lap = int(laps.max())
    min_lap = int(laps.min())
    rot = params.rotation
    fwd_z = birkhoff_sums(f, rot, z.x, max(max_lap, 0) + 1, 1)
    fwd_w = birkhoff_sums(f, rot, z_prime.x, max(max_lap, 0) + 1, 1)
    shift = np.empty(grid.size)
    pos = laps >= 0
    shift[pos] = fwd_w[laps[pos]] - fwd_z[laps[pos]]
    if min_lap < 0:
        bwd_z = birkhoff_sums(f, rot, z.x, -min_lap, -1)
        bwd_w = birkhoff_sums(f, rot, z_prime.x, -min_lap, -1)
        neg = ~pos
        shift[neg] = bwd_w[-laps[neg]] - bwd_z[-laps[neg]]
    shift += z.s - z_prime.s
    ys, rs, _ = orbit_states(params, z_prime, grid + shift)
    dev = circle_distance(xs, ys) + np.abs(ss - rs)
    bad = np.nonzero(dev >= eps * eps)[0]
    return ShadowingReport(
        start_distance=flow_metric(z, z_prime),
        radius=shadowing_radius(eps, f),
        max_deviation=float(dev.max()),
        violations=tuple(float(t) for t in grid[bad]),
        grid_points=int(grid.size),
        good_measure=math.fsum(b - a for a, b in good),
        horizon=T,
        epsilon=eps,
    )


def sample_points(params, count, rng):
    """Uniform samples of the region under the roof, by rejection."""
    f = params.roof
    xs, ss = [], []
    have = 0
    while have < count:
        n = max(64, int(1.3 * (count - have) * f.sup_bound / max(f.mean, 1e-12)))
        x = rng.random(n)
        s = rng.random(n) * f.sup_bound
        ok = s < f.eval_many(x)
        xs.append(x[ok])
        ss.append(s[ok])
        have += int(ok.sum())
    return np.concatenate(xs)[:count], np.concatenate(ss)[:count]


def _box_masses(f, nx, ns):
    """Fraction of the area under the roof in each grid box."""
    grid = (np.arange(CELLS_PER_BOX * nx) + 0.5) / (CELLS_PER_BOX * nx)
    tops = f.eval_many(grid)
    edges = np.linspace(0.0, f.sup_bound, ns + 1)
    cover = np.clip(tops[:, None] - edges[None, :-1], 0.0, np.diff(edges)[None, :])
    per_cell = cover / (CELLS_PER_BOX * nx)
    masses = per_cell.reshape(nx, CELLS_PER_BOX, ns).sum(axis=1)
    return masses / f.mean


@dataclass(frozen=True)
class MeasureAudit:
    times: tuple
    samples: int
    max_z: float
    z_scores: dict

    @property
    def ok(self):
        return self.max_z <= 4.0


def measure_preservation_audit(params, times=(1.0, 10.0, 100.0), samples=100_000,
                               boxes=(4, 4), seed=0):
    """Push uniform samples through T_t and compare box counts with box masses."""
    rng = np.random.default_rng(seed)
    f = params.roof
    nx, ns = boxes
    expected = _box_masses(f, nx, ns)
    xs, ss = sample_points(params, samples, rng)
    z_scores = {}
    worst = 0.0
    for t in times:
        px, ps = flow_map_many(params, xs, ss, t)
        ix = np.minimum((px * nx).astype(int), nx - 1)
        js = np.minimum((ps / f.sup_bound * ns).astype(int), ns - 1)
        counts = np.zeros((nx, ns))
        np.add.at(counts, (ix, js), 1.0)
        mean = expected * samples
        sd = np.sqrt(np.maximum(samples * expected * (1.0 - expected), 1e-12))
        z = np.where(expected > 0, (counts - mean) / sd, 0.0)
        z_scores[t] = z
        worst = max(worst, float(np.abs(z).max()))
    return MeasureAudit(tuple(times), samples, worst, z_scores)


@dataclass(frozen=True)
class GroupLawAudit:
    trials: int
    max_defect: float
    count_mismatches: int

    @property
    def ok(self):
        return self.max_defect <= 1e-9 and self.count_mismatches == 0


def group_law_audit(params, trials=1000, t_max=1000.0, seed=0):
    """Check T_{t1+t2} = T_{t1} T_{t2} and additivity of hitting counts."""
    rng = np.random.default_rng(seed)
    xs, ss = sample_points(params, trials, rng)
    t1s = rng.uniform(-t_max, t_max, trials)
    t2s = rng.uniform(-t_max, t_max, trials)
    worst = 0.0
    mismatches = 0
    for x, s, t1, t2 in zip(xs, ss, t1s, t2s):
        z = FlowPoint(float(x), float(s))
        mid = flow_map(params, z, float(t2))
        direct = flow_map(params, z, float(t1 + t2))
        composed = flow_map(params, mid, float(t1))
        worst = max(worst, flow_metric(direct, composed))
        n_total = hitting_count(params, z, float(t1 + t2))
        n_split = hitting_count(params, z, float(t2)) + hitting_count(params, mid, float(t1))
        if n_total != n_split:
            mismatches += 1
    return GroupLawAudit(trials, worst, mismatches)


def orbit_dump(params, point, T, step):
    """Rows (t, x, s, N) along the orbit for t = 0, step, ..., T."""
    k = int(math.floor(T / step + 1e-9))
    times = np.arange(k + 1) * step
    xs, ss, laps = orbit_states(params, point, times)
    return [
        (float(t), float(x), float(s), int(n))
        for t, x, s, n in zip(times, xs, ss, laps)
    ]
