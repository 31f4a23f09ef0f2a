"""Unit tests for roof functions and Birkhoff sums."""

import math
import unittest
from fractions import Fraction

from rigidity_lab.arith.diophantine import parse_frequency
from rigidity_lab.dynamics.roof import (
    RoofFunction,
    birkhoff_sum,
    birkhoff_sum_exact,
    birkhoff_sums,
    dk_audit,
    empirical_n_eps,
    eval_roof,
    linear_bound_audit,
    normalize_positive_jump,
    ostrowski_birkhoff_split,
)
from rigidity_lab.errors import NonfiniteVariation, ZeroJump

GOLDEN = parse_frequency("cf:[1]")
SILVER = parse_frequency("cf:[2,...]")
ROOF_F = RoofFunction.from_text("jump=1.0; c0=1.0; k:1=0.0,0.1")


class TestRoofFunction(unittest.TestCase):
    """Test evaluation and analytic bounds of A{x} + f_ac."""

    def test_mean(self):
        self.assertAlmostEqual(ROOF_F.mean, 1.5)

    def test_eval(self):
        self.assertAlmostEqual(ROOF_F.eval(0.25), 1.35)
        self.assertAlmostEqual(ROOF_F(0.0), 1.0)

    def test_eval_roof_examples(self):
        self.assertAlmostEqual(eval_roof(RoofFunction(1.0, 0.0, ()), 0.25), 0.25)
        g = RoofFunction.make(0.0, 1.0, {1: (0.1, 0.0)})
        self.assertAlmostEqual(eval_roof(g, 0.5), 0.9)
        h = RoofFunction.make(2.0, 0.0, {1: (0.0, 0.3)})
        self.assertAlmostEqual(eval_roof(h, 0.75), 1.2)

    def test_left_limit_at_jump(self):
        self.assertAlmostEqual(ROOF_F.eval(1.0 - 1e-12), 2.0, places=9)

    def test_variation(self):
        self.assertAlmostEqual(ROOF_F.variation, 1.0 + 2 * math.pi * 0.1)

    def test_bounds_enclose_values(self):
        self.assertTrue(0.99 < ROOF_F.inf_bound <= 1.0)
        self.assertGreaterEqual(ROOF_F.sup_bound, 2.0)

    def test_eval_many_matches_eval(self):
        xs = [0.0, 0.1, 0.5, 0.9]
        for x, v in zip(xs, ROOF_F.eval_many(xs)):
            self.assertAlmostEqual(v, ROOF_F.eval(x), places=14)

    def test_text_round_trip(self):
        self.assertEqual(RoofFunction.from_text(ROOF_F.to_text()), ROOF_F)

    def test_unknown_term(self):
        with self.assertRaises(ValueError):
            RoofFunction.from_text("jump=1; slope=2")

    def test_duplicate_harmonic(self):
        with self.assertRaises(NonfiniteVariation):
            RoofFunction(0.0, 1.0, ((1, 0.1, 0.0), (1, 0.2, 0.0)))

    def test_derivative(self):
        a, b = ROOF_F.derivative().coefficient(1)
        self.assertAlmostEqual(a, 2 * math.pi * 0.1)
        self.assertAlmostEqual(b, 0.0)

    def test_difference(self):
        g = RoofFunction.from_text("jump=2.0; c0=1.0; k:1=0.1,0.0")
        diff = g - ROOF_F
        self.assertEqual(diff.jump, 1.0)
        self.assertEqual(diff.coefficient(1), (0.1, -0.1))


class TestBirkhoffSums(unittest.TestCase):
    """Test forward and backward cocycle sums."""

    def test_matches_exact_oracle(self):
        sums = birkhoff_sums(ROOF_F, GOLDEN, 0.1, 500)
        self.assertAlmostEqual(sums[500], birkhoff_sum_exact(ROOF_F, GOLDEN, 0.1, 500), places=9)

    def test_single_sum_matches_array(self):
        sums = birkhoff_sums(ROOF_F, GOLDEN, 0.3, 200)
        self.assertAlmostEqual(birkhoff_sum(ROOF_F, GOLDEN, 0.3, 137), sums[137], places=10)

    def test_backward_convention(self):
        alpha = float(GOLDEN.value())
        sums = birkhoff_sums(ROOF_F, GOLDEN, 0.3, 5, direction=-1)
        self.assertAlmostEqual(sums[1], -ROOF_F.eval((0.3 - alpha) % 1.0), places=12)
        self.assertAlmostEqual(birkhoff_sum(ROOF_F, GOLDEN, 0.3, -5), sums[5], places=12)

    def test_exact_rational_rotation(self):
        f = RoofFunction(1.0, 0.0, ())
        # {0}, {1/3}, {2/3}
        self.assertAlmostEqual(birkhoff_sum_exact(f, Fraction(1, 3), 0, 3), 1.0)

    def test_bad_direction(self):
        with self.assertRaises(ValueError):
            birkhoff_sums(ROOF_F, GOLDEN, 0.0, 3, direction=0)


class TestDenjoyKoksma(unittest.TestCase):
    """Test deviations at denominator times stay below the variation."""

    def test_sawtooth(self):
        f = RoofFunction(1.0, 0.0, ())
        for alpha in (GOLDEN, SILVER):
            report = dk_audit(f, alpha, range(1, 13), 500, seed=0)
            self.assertTrue(report.ok, report.violations)

    def test_cosine(self):
        f = RoofFunction.make(0.0, 0.0, {1: (1.0, 0.0)})
        self.assertAlmostEqual(f.variation, 2 * math.pi)
        report = dk_audit(f, GOLDEN, range(1, 13), 500, seed=1)
        self.assertTrue(report.ok)

    def test_linear_bound(self):
        self.assertEqual(linear_bound_audit(ROOF_F, GOLDEN, 0.05, 500, 50, seed=0), [])
        report = dk_audit(ROOF_F, GOLDEN, range(1, 8), 100, seed=2, linear_pairs=((0.05, 500),))
        self.assertEqual(report.linear_violations, ())

    def test_empirical_n_eps(self):
        n_eps = empirical_n_eps(ROOF_F, GOLDEN, 0.05, samples=8, n_max=2000)
        self.assertIsNotNone(n_eps)
        self.assertTrue(1 <= n_eps <= 2000)

    def test_ostrowski_split(self):
        cf = GOLDEN.extended(20)
        split = ostrowski_birkhoff_split(ROOF_F, cf, 0.2, 1000)
        self.assertAlmostEqual(split.total, birkhoff_sum(ROOF_F, cf, 0.2, 1000), places=8)
        self.assertLessEqual(split.deviation, split.deviation_bound + 1e-9)
        self.assertLessEqual(abs(split.total - 1000 * ROOF_F.mean), split.deviation + 1e-9)


class TestNormalizeJump(unittest.TestCase):
    """Test reflection of roofs with negative jumps."""

    def test_positive_jump_untouched(self):
        _, roof, tag = normalize_positive_jump(GOLDEN, ROOF_F)
        self.assertIs(roof, ROOF_F)
        self.assertEqual(str(tag), "identity")

    def test_negative_jump_reflected(self):
        f = RoofFunction.from_text("jump=-1.0; c0=2.0; k:1=0.0,0.1")
        rot, h, tag = normalize_positive_jump(GOLDEN, f)
        self.assertEqual(h.jump, 1.0)
        x = 0.3
        self.assertAlmostEqual(
            birkhoff_sum(h, rot, tag.map_point(x), 100),
            birkhoff_sum(f, GOLDEN, x, 100),
            places=8,
        )

    def test_zero_jump(self):
        with self.assertRaises(ZeroJump):
            normalize_positive_jump(GOLDEN, RoofFunction.constant_roof(1.0))


if __name__ == "__main__":
    unittest.main()
