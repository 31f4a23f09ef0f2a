"""Step definitions for Special Flows and Cohomology feature."""

import numpy as np
from behave import given, when, then

from rigidity_lab import config
from rigidity_lab.arith.circle import frac
from rigidity_lab.arith.diophantine import parse_frequency
from rigidity_lab.dynamics.coboundary import dichotomy
from rigidity_lab.dynamics.roof import RoofFunction
from rigidity_lab.dynamics.special_flow import FlowParams, group_law_audit
from rigidity_lab.dynamics.trichotomy import classify


@given("the acceptance roof f over the golden rotation")
def step_acceptance_flow(context):
    roof = RoofFunction.from_text(config.ROOF_F)
    context.test_data["flow"] = FlowParams(parse_frequency(config.GOLDEN), roof)


@when("I audit the group law on {trials:d} random times")
def step_group_law(context, trials):
    context.test_data["audit"] = group_law_audit(
        context.test_data["flow"], trials=trials, t_max=100.0, seed=0
    )


@then("the group law should hold")
def step_group_law_holds(context):
    audit = context.test_data["audit"]
    assert audit.ok, f"Group law failed: {audit}"


@when("I classify {count:d} seeded arcs at index {n:d}")
def step_classify(context, count, n):
    beta = context.test_data["freq"]
    width = 1.0 / (6 * beta.q(n))
    rng = np.random.default_rng(n)
    verdicts = []
    for _ in range(count):
        y = float(rng.random())
        dy = (1.0 - float(rng.random())) * width * 0.999
        verdicts.append(classify(y, frac(y + dy), beta, n))
    context.test_data["verdicts"] = verdicts


@then("every arc should satisfy some clause")
def step_all_clauses(context):
    missing = [v for v in context.test_data["verdicts"] if not v.any_holds]
    assert not missing, f"{len(missing)} arcs satisfy no clause"


@when('I compare roof "{text}" with the acceptance roof f')
def step_dichotomy(context, text):
    context.test_data["verdict"] = dichotomy(
        RoofFunction.from_text(text),
        RoofFunction.from_text(config.ROOF_F),
        parse_frequency(config.GOLDEN),
        64,
    )


@then('the verdict should be "{kind}"')
def step_verdict(context, kind):
    verdict = context.test_data["verdict"]
    assert verdict.kind == kind, verdict.to_text()


@then("the transfer residual should be below {bound:g}")
def step_transfer_residual(context, bound):
    transfer = context.test_data["verdict"].transfer
    assert transfer is not None and transfer.residual < bound, transfer
