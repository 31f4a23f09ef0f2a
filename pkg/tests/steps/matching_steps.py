"""Step definitions for Matching Windows feature."""

import numpy as np
from behave import given, when, then

from rigidity_lab import config
from rigidity_lab.arith.diophantine import parse_frequency
from rigidity_lab.db.database import RunsDB
from rigidity_lab.dynamics.roof import RoofFunction
from rigidity_lab.matching.criterion import FAILURE_KINDS, build_context, criterion_audit


@given('the matching setup with alpha "{alpha}" and golden beta')
def step_matching_setup(context, alpha):
    data = context.test_data
    data["alpha"] = parse_frequency(alpha)
    data["beta"] = parse_frequency(config.GOLDEN)
    data["f"] = RoofFunction.from_text(config.ROOF_F)
    data["g"] = RoofFunction.from_text(config.ROOF_G)
    data["ctx"] = build_context(data["f"], data["g"], data["alpha"], data["beta"],
                                0.05, 10, "desk-scale", "unbounded", c=0.05)


@then("the E_k scale should be {k:d}")
def step_scale(context, k):
    got = context.test_data["ctx"].ek.k
    assert got == k, f"Scale {got}"


@when("I draw {count:d} points from E_k")
def step_draw_ek(context, count):
    ek = context.test_data["ctx"].ek
    rng = np.random.default_rng(0)
    context.test_data["points"] = [ek.sample(rng) for _ in range(count)]


@then("every point should hit forward and backward")
def step_hits(context):
    ek = context.test_data["ctx"].ek
    for p in context.test_data["points"]:
        hits = ek.forward_backward_hits(p.x)
        assert hits == (True, True), f"x = {p.x!r}: {hits}"


@when("I run a criterion audit with {trials:d} trials")
def step_audit(context, trials):
    data = context.test_data
    data["report"] = criterion_audit(data["f"], data["g"], data["alpha"], data["beta"],
                                     0.05, 10, trials, 0, context=data["ctx"])


@then("the report should hold {trials:d} trials")
def step_report_trials(context, trials):
    report = context.test_data["report"]
    assert report.trials == trials
    assert [r.index for r in report.results] == list(range(trials))


@then("every failure should be a known kind")
def step_known_failures(context):
    for kind in context.test_data["report"].failures:
        assert kind in FAILURE_KINDS, f"Unknown failure {kind!r}"


@then("the ledger at DB should hold {runs:d} run")
def step_ledger_at_db(context, runs):
    db = RunsDB(context.test_data["db_path"])
    try:
        got = db.get_stats()["runs"]
    finally:
        db.close()
    assert got == runs, f"Ledger holds {got} runs"
