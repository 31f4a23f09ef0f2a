"""
rlab — CLI for rigidity-lab experiments.

Commands:
    rlab cf           Partial quotients and denominators of a frequency
    rlab ostrowski    Ostrowski digits of an integer
    rlab dk-audit     Denjoy-Koksma deviations at denominator times
    rlab flow-orbit   Orbit dump of a special flow with good times
    rlab trichotomy   Arc clauses for seeded short arcs
    rlab match        Matching-window criterion audit
    rlab lift         Continuous lifts of the audited windows
    rlab coboundary   Equal/unequal jump dichotomy and transfer function
    rlab joining      Product and diagonal correlation statistics
    rlab run FILE     Run the subcommand named in a config file
    rlab runs         Recorded runs (stats, prune, path)
    rlab version      Show version
"""

import argparse
import logging
import os
import sqlite3
import sys
from dataclasses import replace
from datetime import datetime

import numpy as np

from rigidity_lab import __version__
from rigidity_lab.arith.diophantine import classify_type, cf_from_real, ostrowski_decompose
from rigidity_lab.config import (
    GOLDEN,
    ROOF_F,
    ROOF_G,
    ExperimentConfig,
    load,
    resolve,
)
from rigidity_lab.db.database import RunsDB, default_db_path
from rigidity_lab.db.history import RunHistory
from rigidity_lab.db.recorder import RunRecorder
from rigidity_lab.dynamics.coboundary import (
    cocycle_identity_defect,
    dichotomy,
    small_divisor_profile,
)
from rigidity_lab.dynamics.joining import (
    Observable,
    product_birkhoff_correlation,
    self_joining_control,
)
from rigidity_lab.dynamics.roof import RoofFunction, dk_audit
from rigidity_lab.dynamics.special_flow import (
    FlowParams,
    FlowPoint,
    group_law_audit,
    good_times,
    orbit_dump,
    sample_points,
)
from rigidity_lab.dynamics.trichotomy import classify
from rigidity_lab.errors import ConfigError, RigidityLabError
from rigidity_lab.matching.constants import TYPE_BOUND, TYPE_HORIZON
from rigidity_lab.matching.criterion import COUPLINGS, criterion_audit
from rigidity_lab.report import Table, write_csv

log = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s [rigidity-lab] %(message)s"
LOG_DATEFMT = "%Y-%m-%d %H:%M:%S"

# rows shown in terminal tables before eliding
TABLE_ROWS = 20

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2

DEFAULT_DEPTH = 12
DEFAULT_SCALE = 6
DEFAULT_INDEX_RANGE = "1:12"
DEFAULT_DK_SAMPLES = 10_000
DEFAULT_TRICHOTOMY_SAMPLES = 1000
DEFAULT_ORBIT_HORIZON = 100.0
DEFAULT_ORBIT_STEPS = 1000
DEFAULT_JOINING_HORIZON = 1e4
DEFAULT_JOINING_STARTS = 8
DEFAULT_MAX_HARMONIC = 64
GROUP_LAW_TRIALS = 100
TRANSFER_RESIDUAL_TOLERANCE = 1e-8
COCYCLE_DEFECT_TOLERANCE = 1e-6
JOINING_GAP = 0.1


def _stat(label, value):
    print(f"  {label + ':':<18} {value}")


def _emit(cfg, header, rows):
    """CSV to --out (or stdout with '-'), otherwise a terminal table."""
    if cfg.out:
        write_csv(cfg.out, header, rows)
        if cfg.out != "-":
            print(f"✓ Wrote {len(rows)} rows to {cfg.out}")
        return
    table = Table(header)
    for row in rows[:TABLE_ROWS]:
        table.add_row([_cell(v) for v in row])
    print(table.render())
    if len(rows) > TABLE_ROWS:
        print(f"  … {len(rows) - TABLE_ROWS} more rows (use --out FILE for all)")


def _cell(v):
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.6g}"
    return v


def _frequency(cfg, key):
    if getattr(cfg, key) is None:
        return replace(cfg, **{key: GOLDEN}).frequency(key)
    return cfg.frequency(key)


def _roof(cfg, key, default):
    if getattr(cfg, key) is None:
        return RoofFunction.from_text(default)
    return cfg.roof(key)


def cmd_cf(cfg, args):
    """Partial quotients and denominators of a frequency."""
    depth = cfg.depth or DEFAULT_DEPTH
    if cfg.real is not None:
        try:
            cf = cf_from_real(cfg.real, depth=depth)
        except ValueError as e:
            raise ConfigError(f"real: {e}") from e
    else:
        cf = _frequency(cfg, "alpha").extended(depth)
    print(f"  {'Frequency:':<18} {cf.to_text()}")
    if cf.unreliable_last:
        print("  ⚠ last digit is not certified")
    rows = [(n, cf.digit(n), cf.q(n), cf.p(n)) for n in range(1, depth + 1)]
    _emit(cfg, ["n", "a_n", "q_n", "p_n"], rows)
    horizon = min(depth, TYPE_HORIZON)
    _stat("Type", classify_type(cf, horizon, TYPE_BOUND))
    return EXIT_OK


def cmd_ostrowski(cfg, args):
    """Ostrowski digits of n over the frequency's denominators."""
    if cfg.n is None or cfg.n < 1:
        raise ConfigError("ostrowski needs n >= 1")
    cf = _frequency(cfg, "alpha")
    cf = cf.extended(cf.index_exceeding(cfg.n))
    digits = ostrowski_decompose(cfg.n, cf)
    rows = [(i, digits.denominators[i], b) for i, b in digits.nonzero()]
    _emit(cfg, ["i", "q_i", "b_i"], rows)
    if digits.value == cfg.n and digits.bounds_hold():
        print(f"✓ {cfg.n} = {' + '.join(f'{b}*{q}' for _, q, b in rows)}")
        return EXIT_OK
    print(f"✖ Decomposition of {cfg.n} does not reconstruct within digit bounds")
    return EXIT_VIOLATION


def cmd_dk_audit(cfg, args):
    """Denjoy-Koksma deviations at denominator times."""
    f = _roof(cfg, "roof_f", ROOF_F)
    alpha = _frequency(cfg, "alpha")
    lo, hi = (cfg.index_bounds() if cfg.index_range
              else replace(cfg, index_range=DEFAULT_INDEX_RANGE).index_bounds())
    report = dk_audit(f, alpha, range(lo, hi + 1), cfg.samples or DEFAULT_DK_SAMPLES, cfg.seed)
    rows = [(r.n, r.q, r.sup_deviation, report.variation, r.argmax) for r in report.records]
    _emit(cfg, ["n", "q_n", "sup_deviation", "variation", "argmax"], rows)
    if report.ok:
        print(f"✓ No deviation above Var = {report.variation:.6g}")
        return EXIT_OK
    print(f"✖ {len(report.violations)} denominator indices exceed Var = {report.variation:.6g}")
    return EXIT_VIOLATION


def cmd_flow_orbit(cfg, args):
    """Orbit of a seeded start point, with good-time membership."""
    params = FlowParams(_frequency(cfg, "alpha"), _roof(cfg, "roof_f", ROOF_F))
    T = cfg.horizon or DEFAULT_ORBIT_HORIZON
    steps = cfg.samples or DEFAULT_ORBIT_STEPS
    rng = np.random.default_rng(cfg.seed)
    xs, ss = sample_points(params, 1, rng)
    start = FlowPoint(float(xs[0]), float(ss[0]))
    good = good_times(params, start, T, cfg.epsilon, cfg.bad_set, calibrate=False)
    rows = [(t, x, s, n, int(good.contains(t)))
            for t, x, s, n in orbit_dump(params, start, T, T / steps)]
    _emit(cfg, ["t", "x", "s", "N", "good"], rows)
    _stat("Start", f"({start.x:.6f}, {start.s:.6f})")
    _stat("Good measure", f"{good.measure:.6g} of {T:g} ({good.count} intervals)")
    audit = group_law_audit(params, GROUP_LAW_TRIALS, T, cfg.seed)
    if audit.ok:
        print(f"✓ Group law holds (max defect {audit.max_defect:.3g})")
        return EXIT_OK
    print(f"✖ Group law defect {audit.max_defect:.3g}, "
          f"{audit.count_mismatches} hitting-count mismatches")
    return EXIT_VIOLATION


def cmd_trichotomy(cfg, args):
    """Arc clauses for seeded arcs shorter than 1/(6 q_n)."""
    beta = _frequency(cfg, "beta")
    n = cfg.n or DEFAULT_SCALE
    width = 1.0 / (6 * beta.q(n))
    rng = np.random.default_rng(cfg.seed)
    rows = []
    empty = 0
    for i in range(cfg.samples or DEFAULT_TRICHOTOMY_SAMPLES):
        y = float(rng.random())
        dy = (1.0 - float(rng.random())) * width * 0.999
        y2 = (y + dy) % 1.0
        v = classify(y, y2, beta, n)
        if not v.any_holds:
            empty += 1
        rows.append((i, y, y2, "+".join(v.clauses()) or "none",
                     v.witness_i, v.witness_ii, v.witness_iii))
    _emit(cfg, ["trial", "y", "y2", "clauses", "witness_i", "witness_ii", "witness_iii"], rows)
    if empty:
        print(f"✖ {empty} arcs satisfy no clause at n = {n}")
        return EXIT_VIOLATION
    print(f"✓ Every arc satisfies a clause at n = {n} (q_n = {beta.q(n)})")
    return EXIT_OK


def _criterion(cfg):
    return criterion_audit(
        _roof(cfg, "roof_f", ROOF_F),
        _roof(cfg, "roof_g", ROOF_G),
        _frequency(cfg, "alpha"),
        _frequency(cfg, "beta"),
        cfg.epsilon,
        cfg.N,
        cfg.trials,
        cfg.seed,
        mode=cfg.mode,
        branch=cfg.branch,
        c=cfg.c,
        workers=cfg.workers,
        coupling=cfg.coupling,
    )


def _print_criterion(report):
    if report.constants is not None:
        for label, value in report.constants.summary():
            _stat(label, value)
        _stat("scale k", report.k)
    total = report.trials
    if not total:
        print("  No trials run")
        return
    _stat("verified", f"{report.window_successes}/{total} ({100.0 * report.window_rate:.1f}%)")
    _stat("lifted", f"{report.lift_successes}/{total} ({100.0 * report.lift_rate:.1f}%)")
    _stat("forward", report.forward_successes)
    _stat("backward", report.backward_successes)
    for kind, count in sorted(report.failures.items()):
        _stat(f"failed {kind}", count)


def _criterion_verdict(report, label, rate, floor):
    """✓/✖ line for a criterion run; rate below floor or a broken
    two-window case is a violation."""
    breaks = report.pair_guarantee_breaks
    if breaks:
        print(f"✖ {len(breaks)} two-window cases with no candidate in P (trials {breaks[:10]})")
        return EXIT_VIOLATION
    if report.trials and rate < floor:
        print(f"✖ {label} rate {100.0 * rate:.1f}% below {100.0 * floor:.1f}%")
        return EXIT_VIOLATION
    print(f"✓ {label} rate {100.0 * rate:.1f}% (floor {100.0 * floor:.1f}%)")
    return EXIT_OK


def _record(args, cfg, record):
    if args.no_record:
        return
    try:
        db = RunsDB(cfg.db)
        try:
            run_id = record(RunRecorder(db))
        finally:
            db.close()
        log.debug("Recorded run %d in %s", run_id, cfg.db or default_db_path())
    except sqlite3.Error as e:
        log.warning("Could not record run: %s", e)


def cmd_match(cfg, args):
    """Matching-window criterion audit."""
    report = _criterion(cfg)
    rows = []
    for r in report.results:
        check = getattr(r, "check", None)
        w = check.window if check is not None else None
        lift = getattr(r, "lift", None)
        rows.append((
            r.index,
            getattr(r, "direction", ""),
            w.case if w else "",
            w.M if w else None,
            w.L if w else None,
            w.p if w else None,
            w.q if w else None,
            check.residual_f if check is not None else None,
            check.residual_g if check is not None else None,
            check is not None and check.passed,
            lift is not None and lift.passed,
            r.failure or "",
        ))
    _emit(cfg, ["trial", "direction", "case", "M", "L", "p", "q",
                "residual_f", "residual_g", "verified", "lifted", "failure"], rows)
    _print_criterion(report)
    _record(args, cfg, lambda rec: rec.record_criterion(report, cfg, "match"))
    return _criterion_verdict(report, "Window", report.window_rate, cfg.min_match)


def cmd_lift(cfg, args):
    """Continuous lifts of the audited windows."""
    report = _criterion(cfg)
    rows = []
    for r in report.results:
        lift = getattr(r, "lift", None)
        if lift is None:
            rows.append((r.index, None, None, None, None, None, None, r.failure or ""))
            continue
        rows.append((r.index, lift.M, lift.L, lift.ratio, lift.good_measure,
                     lift.max_distance_f, lift.max_distance_g, lift.failure or ""))
    _emit(cfg, ["trial", "M", "L", "ratio", "good_measure",
                "max_distance_f", "max_distance_g", "failure"], rows)
    _print_criterion(report)
    _record(args, cfg, lambda rec: rec.record_criterion(report, cfg, "lift"))
    return _criterion_verdict(report, "Lift", report.lift_rate, cfg.min_lift)


def cmd_coboundary(cfg, args):
    """Jump dichotomy and, for equal jumps, the transfer function."""
    f_phi = _roof(cfg, "roof_f", ROOF_F)
    f_psi = _roof(cfg, "roof_g", ROOF_G)
    alpha = _frequency(cfg, "alpha")
    max_harmonic = cfg.max_harmonic or DEFAULT_MAX_HARMONIC
    verdict = dichotomy(f_psi, f_phi, alpha, max_harmonic)
    solved = {}
    if verdict.transfer is not None:
        solved = {h.k: h for h in verdict.transfer.harmonics}
    rows = []
    for k, divisor, is_q in small_divisor_profile(alpha, max_harmonic):
        h = solved.get(k)
        rows.append((k, divisor, is_q, h.cos if h else None, h.sin if h else None))
    _emit(cfg, ["k", "divisor", "is_denominator", "xi_cos", "xi_sin"], rows)
    _stat("Verdict", verdict.kind)
    _stat("Reason", verdict.reason)
    if verdict.dc_horizon is not None:
        dc = verdict.dc_violation
        _stat("DC check", "no violation" if dc is None else f"violated at n = {dc}")
    equal = abs(f_psi.jump) == abs(f_phi.jump)
    if verdict.kind == "disjoint" and equal:
        print(f"✖ Disjoint verdict with equal jumps |A| = {abs(f_psi.jump):g}")
        return EXIT_VIOLATION
    if verdict.transfer is None:
        if verdict.kind == "cohomologous" or (verdict.kind != "disjoint" and not equal):
            print(f"✖ Verdict {verdict.kind} contradicts the jumps")
            return EXIT_VIOLATION
        print(f"✓ Verdict {verdict.kind}")
        return EXIT_OK
    diff = f_psi - f_phi
    phi = RoofFunction(0.0, 0.0, diff.harmonics)
    defect = cocycle_identity_defect(phi, verdict.transfer, alpha, seed=cfg.seed)
    residual = verdict.transfer.residual
    _stat("Residual", f"{residual:.3g}")
    _stat("Cocycle defect", f"{defect:.3g}")
    _stat("Min divisor", f"{verdict.transfer.min_divisor:.3g}")
    if not equal:
        print(f"✖ Transfer function found for unequal jumps {f_psi.jump:g}, {f_phi.jump:g}")
        return EXIT_VIOLATION
    if residual > TRANSFER_RESIDUAL_TOLERANCE or defect > COCYCLE_DEFECT_TOLERANCE:
        print(f"✖ Transfer residual {residual:.3g} or cocycle defect {defect:.3g} "
              f"above {TRANSFER_RESIDUAL_TOLERANCE:g} / {COCYCLE_DEFECT_TOLERANCE:g}")
        return EXIT_VIOLATION
    print(f"✓ Cohomologous (residual {residual:.3g}, cocycle defect {defect:.3g})")
    return EXIT_OK


def cmd_joining(cfg, args):
    """Product-orbit correlations against the diagonal control."""
    f_a, f_b = _roof(cfg, "roof_f", ROOF_F), _roof(cfg, "roof_g", ROOF_G)
    flow_a = FlowParams(_frequency(cfg, "alpha"), f_a)
    flow_b = FlowParams(_frequency(cfg, "beta"), f_b)
    T = cfg.horizon or DEFAULT_JOINING_HORIZON
    starts = cfg.samples or DEFAULT_JOINING_STARTS
    obs = Observable.cosine(1)
    product = product_birkhoff_correlation(flow_a, flow_b, obs, obs, T, starts, cfg.seed)
    control = self_joining_control(flow_a, obs, T, starts, cfg.seed)
    rows = [("product", r.start, r.joint, r.marginal_a, r.marginal_b, r.gap)
            for r in product.rows]
    rows += [("diagonal", r.start, r.joint, r.marginal_a, r.marginal_b, r.gap)
             for r in control.rows]
    _emit(cfg, ["kind", "start", "joint", "marginal_a", "marginal_b", "gap"], rows)
    print(f"  Product joining ({product.banner})")
    for label, value in product.summary():
        _stat(label, value)
    print("  Diagonal control")
    for label, value in control.summary():
        _stat(label, value)
    if product.gap:
        _stat("control / gap", f"{control.gap / abs(product.gap):.3g}")
    _record(args, cfg, lambda rec: rec.record_joining(product, cfg, JOINING_GAP))
    bound = obs.bound(f_a) * obs.bound(f_b)
    over = [r.start for r in product.rows if abs(r.joint) > bound + 1e-12]
    if over:
        print(f"✖ Joint averages above the sup-norm bound {bound:.6g} at starts {over}")
        return EXIT_VIOLATION
    if abs(f_a.jump) == abs(f_b.jump):
        print("✓ Equal jumps: correlations reported, no separation expected")
        return EXIT_OK
    if abs(product.gap) > JOINING_GAP:
        print(f"✖ Product gap {product.gap:.3g} exceeds {JOINING_GAP:g} for unequal jumps")
        return EXIT_VIOLATION
    print(f"✓ Product gap {product.gap:.3g} within {JOINING_GAP:g}")
    return EXIT_OK


def cmd_runs(cfg, args):
    """Recorded runs: list (default), stats, prune or path."""
    path = cfg.db or default_db_path()
    if args.runs_action == "path":
        print(path)
        return EXIT_OK
    if not os.path.exists(path):
        print("  Database:   not found")
        return EXIT_OK
    db = RunsDB(path)
    try:
        if args.runs_action == "prune":
            removed = db.prune()
            print(f"✓ Pruned {removed} runs")
            _print_db_stats(db)
        elif args.runs_action == "stats":
            _print_db_stats(db)
        else:
            _print_runs(db)
    finally:
        db.close()
    return EXIT_OK


def _print_db_stats(db):
    stats = db.get_stats()
    size_mb = stats["size_bytes"] / 1024 / 1024
    print(f"  Database:   {db.db_path} ({size_mb:.1f}MB)")
    _stat("Runs", f"{stats['runs']:>6} records")
    _stat("Trials", f"{stats['trials']:>6} records")
    if stats["oldest"]:
        oldest = datetime.fromtimestamp(stats["oldest"]).strftime("%Y-%m-%d %H:%M")
        _stat("Oldest run", oldest)


def _print_runs(db):
    table = Table(["id", "when", "subcommand", "preset", "trials", "rate", "trend"])
    history = RunHistory(db)
    for row, arrow in history.run_trends():
        rate = history.success_rate(row)
        table.add_row([
            row["id"],
            datetime.fromtimestamp(row["timestamp"]).strftime("%Y-%m-%d %H:%M"),
            row["subcommand"],
            row["preset"] or "-",
            row["trials"],
            "-" if rate is None else f"{100.0 * rate:.1f}%",
            arrow,
        ])
    print(table.render())


def cmd_version(cfg, args):
    """Show version."""
    print(f"rigidity-lab {__version__}")
    return EXIT_OK


COMMANDS = {
    "cf": cmd_cf,
    "ostrowski": cmd_ostrowski,
    "dk-audit": cmd_dk_audit,
    "flow-orbit": cmd_flow_orbit,
    "trichotomy": cmd_trichotomy,
    "match": cmd_match,
    "lift": cmd_lift,
    "coboundary": cmd_coboundary,
    "joining": cmd_joining,
    "runs": cmd_runs,
}


def run(config, args=None):
    """Execute config.subcommand and return its exit status.

    Errors propagate; main() maps them to exit codes.
    """
    if args is None:
        args = argparse.Namespace(no_record=False, runs_action="list")
    name = config.subcommand
    if name not in COMMANDS:
        raise ConfigError(f"config names no runnable subcommand ({name!r})")
    return COMMANDS[name](config, args)


def _options():
    """Flags shared by every experiment subcommand; unset flags stay None."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--preset", help="named preset to start from")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="CSV output path ('-' for stdout)")
    common.add_argument("--format", choices=["csv"])
    common.add_argument("--no-record", action="store_true",
                        help="do not record the run in the ledger")
    common.add_argument("--db", help="run ledger path")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    common.add_argument("--alpha", help="base frequency, cf:[...] or real:x@bits")
    common.add_argument("--beta", help="second frequency")
    common.add_argument("--roof-f", dest="roof_f", help="roof of the first flow")
    common.add_argument("--roof-g", dest="roof_g", help="roof of the second flow")
    common.add_argument("--mode", choices=["desk-scale", "paper-faithful"])
    common.add_argument("--branch", choices=["unbounded", "bounded"])
    common.add_argument("--epsilon", type=float)
    common.add_argument("-N", dest="N", type=int)
    common.add_argument("-c", dest="c", type=float)
    common.add_argument("--trials", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--horizon", type=float)
    common.add_argument("--samples", type=int)
    common.add_argument("--depth", type=int)
    common.add_argument("--real", help="real number to expand")
    common.add_argument("-n", dest="n", type=int)
    common.add_argument("--index-range", dest="index_range", help="a:b")
    common.add_argument("--max-harmonic", dest="max_harmonic", type=int)
    common.add_argument("--bad-set", dest="bad_set",
                        choices=["jump-collar", "crossing", "mid-strip"])
    common.add_argument("--coupling", choices=list(COUPLINGS),
                        help="how the g-side pair is drawn")
    common.add_argument("--min-match", dest="min_match", type=float,
                        help="verified-window rate below which match fails")
    common.add_argument("--min-lift", dest="min_lift", type=float,
                        help="lift rate below which lift fails")
    return common


OVERRIDE_KEYS = (
    "seed", "out", "format", "db", "alpha", "beta", "roof_f", "roof_g",
    "mode", "branch", "epsilon", "N", "c", "trials", "workers", "horizon",
    "samples", "depth", "real", "n", "index_range", "max_harmonic", "bad_set",
    "coupling", "min_match", "min_lift",
)


def build_config(args):
    """Config file, then preset, then command-line flags."""
    path = args.config_file if args.command == "run" else args.config
    cfg = load(path) if path else ExperimentConfig()
    if args.preset:
        cfg = replace(cfg, preset=args.preset)
    cfg = resolve(cfg)
    overrides = {k: getattr(args, k) for k in OVERRIDE_KEYS}
    if args.command != "run":
        overrides["subcommand"] = args.command if args.command != "runs" else None
    return cfg.with_overrides(**overrides)


def _setup_logging(verbose):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format=LOG_FORMAT,
        datefmt=LOG_DATEFMT,
        stream=sys.stderr,
    )


def main(argv=None):
    common = _options()
    parser = argparse.ArgumentParser(
        prog="rlab",
        description="rigidity-lab — matching windows and disjointness experiments "
                    "for special flows over rotations",
    )
    sub = parser.add_subparsers(dest="command", help="Command")

    sub.add_parser("cf", parents=[common], help="Partial quotients and denominators")
    sub.add_parser("ostrowski", parents=[common], help="Ostrowski digits of n")
    sub.add_parser("dk-audit", parents=[common], help="Denjoy-Koksma audit")
    sub.add_parser("flow-orbit", parents=[common], help="Orbit dump with good times")
    sub.add_parser("trichotomy", parents=[common], help="Arc clause classification")
    sub.add_parser("match", parents=[common], help="Matching-window criterion audit")
    sub.add_parser("lift", parents=[common], help="Continuous lifts of matched windows")
    sub.add_parser("coboundary", parents=[common], help="Jump dichotomy and transfer")
    sub.add_parser("joining", parents=[common], help="Correlation statistics")
    sub.add_parser("version", help="Show version")

    run_parser = sub.add_parser("run", parents=[common],
                                help="Run the subcommand named in a config file")
    run_parser.add_argument("config_file", help="config file with a subcommand key")

    runs_parser = sub.add_parser("runs", parents=[common], help="Recorded runs")
    runs_parser.add_argument("runs_action", nargs="?", default="list",
                             choices=["list", "stats", "prune", "path"],
                             help="Runs action (default: list)")

    args = parser.parse_args(argv)

    if args.command == "version":
        return cmd_version(None, args)
    if args.command not in COMMANDS and args.command != "run":
        parser.print_help()
        return EXIT_OK

    _setup_logging(args.verbose)
    try:
        cfg = build_config(args)
        if args.command == "runs":
            return cmd_runs(cfg, args)
        return run(cfg, args)
    except ConfigError as e:
        print(f"✖ Config error: {e}")
        return EXIT_CONFIG
    except (RigidityLabError, ValueError) as e:
        print(f"✖ {type(e).__name__}: {e}")
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
