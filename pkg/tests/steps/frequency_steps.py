"""Step definitions for Frequencies and Continued Fractions feature."""

from behave import given, when, then

from rigidity_lab.arith.diophantine import (
    bounded_type_constant,
    classify_type,
    ostrowski_decompose,
    parse_frequency,
)


@given('the frequency "{text}"')
def step_frequency(context, text):
    context.test_data["freq"] = parse_frequency(text)


@then("denominator {n:d} should be {q:d}")
def step_denominator(context, n, q):
    got = context.test_data["freq"].q(n)
    assert got == q, f"q_{n} = {got}, expected {q}"


@then("the bounded-type constant should be {value:d}")
def step_type_constant(context, value):
    got = bounded_type_constant(context.test_data["freq"], 10)
    assert got == value, f"Got {got}"


@when("I decompose {n:d} into Ostrowski digits")
def step_decompose(context, n):
    freq = context.test_data["freq"]
    cf = freq.extended(freq.index_exceeding(n))
    context.test_data["digits"] = ostrowski_decompose(n, cf)


@then("the digits should sum back to {n:d}")
def step_digits_sum(context, n):
    digits = context.test_data["digits"]
    total = sum(b * digits.denominators[i] for i, b in digits.nonzero())
    assert total == n == digits.value, f"Digits give {total}"


@then("the digit bounds should hold")
def step_digit_bounds(context):
    assert context.test_data["digits"].bounds_hold()


@then("the type check up to {bound:d} should not be bounded")
def step_unbounded(context, bound):
    verdict = classify_type(context.test_data["freq"], 10, bound)
    assert not verdict.is_bounded, f"Got {verdict}"
