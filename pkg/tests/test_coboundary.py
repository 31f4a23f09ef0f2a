"""Unit tests for the Fourier coboundary solver and the dichotomy."""

import math
import unittest
from fractions import Fraction

import numpy as np

from rigidity_lab import config
from rigidity_lab.arith.diophantine import parse_frequency
from rigidity_lab.dynamics.coboundary import (
    cocycle_identity_defect,
    dichotomy,
    fourier_coboundary_solve,
    small_divisor_profile,
)
from rigidity_lab.dynamics.roof import RoofFunction
from rigidity_lab.errors import (
    NonzeroJump,
    NonzeroMean,
    RoofNotPositive,
    SmallDivisorUnderflow,
)

GOLDEN = parse_frequency("cf:[1]")
ROOF_F = RoofFunction.from_text(config.ROOF_F)
ROOF_G = RoofFunction.from_text(config.ROOF_G)
ROOF_G_EQUAL = RoofFunction.from_text(config.ROOF_G_EQUAL)


class TestSolver(unittest.TestCase):
    """Test xi(x) - xi(x + alpha) = phi(x) on smooth mean-zero phi."""

    def test_single_cosine(self):
        phi = RoofFunction.make(0.0, 0.0, {1: (1.0, 0.0)})
        xi = fourier_coboundary_solve(phi, GOLDEN, 8)
        alpha = float(GOLDEN.value())
        for x in (0.0, 0.17, 0.5, 0.93):
            self.assertAlmostEqual(
                xi.evaluate(x) - xi.evaluate(x + alpha), math.cos(2 * math.pi * x), places=10)
        self.assertLessEqual(xi.residual, 1e-8)

    def test_cocycle_identity(self):
        phi = RoofFunction.make(0.0, 0.0, {1: (0.3, -0.2), 3: (0.0, 0.05)})
        xi = fourier_coboundary_solve(phi, GOLDEN, 8)
        self.assertLessEqual(cocycle_identity_defect(phi, xi, GOLDEN, n_max=1000), 1e-6)

    def test_vectorized_evaluate(self):
        phi = RoofFunction.make(0.0, 0.0, {2: (0.5, 0.5)})
        xi = fourier_coboundary_solve(phi, GOLDEN, 8)
        xs = np.array([0.1, 0.6])
        np.testing.assert_allclose(xi.evaluate(xs), [xi.evaluate(0.1), xi.evaluate(0.6)])

    def test_tail_above_cutoff(self):
        phi = RoofFunction.make(0.0, 0.0, {1: (0.1, 0.0), 40: (0.01, 0.0)})
        xi = fourier_coboundary_solve(phi, GOLDEN, 10)
        self.assertAlmostEqual(xi.tail, 0.01)
        self.assertEqual([h.k for h in xi.harmonics], [1])

    def test_rejects_jump(self):
        with self.assertRaises(NonzeroJump):
            fourier_coboundary_solve(ROOF_F, GOLDEN, 8)

    def test_rejects_mean(self):
        with self.assertRaises(NonzeroMean):
            fourier_coboundary_solve(RoofFunction.constant_roof(0.5), GOLDEN, 8)

    def test_rational_rotation_underflows(self):
        phi = RoofFunction.make(0.0, 0.0, {3: (1.0, 0.0)})
        with self.assertRaises(SmallDivisorUnderflow):
            fourier_coboundary_solve(phi, Fraction(1, 3), 8)


class TestSmallDivisors(unittest.TestCase):
    """Test the |1 - e(k alpha)| profile."""

    def test_denominators_marked(self):
        profile = small_divisor_profile(GOLDEN, 10)
        self.assertEqual(len(profile), 10)
        self.assertEqual({k for k, _, is_q in profile if is_q}, {1, 2, 3, 5, 8})

    def test_smallest_at_denominator(self):
        profile = small_divisor_profile(GOLDEN, 10)
        k, size, _ = min(profile, key=lambda row: row[1])
        self.assertEqual(k, 8)
        self.assertAlmostEqual(profile[0][1], 2 * math.sin(math.pi * float(GOLDEN.value())))

    def test_rational_zero_divisor(self):
        profile = small_divisor_profile(Fraction(1, 3), 3)
        self.assertEqual(profile[2], (3, 0.0, False))

    def test_empty(self):
        self.assertEqual(small_divisor_profile(GOLDEN, 0), [])


class TestDichotomy(unittest.TestCase):
    """Test the cohomologous / disjoint decision."""

    def test_equal_jumps_cohomologous(self):
        verdict = dichotomy(ROOF_G_EQUAL, ROOF_F, GOLDEN, 64)
        self.assertEqual(verdict.kind, "cohomologous")
        self.assertLessEqual(verdict.transfer.residual, 1e-8)
        self.assertIsNone(verdict.dc_violation)
        diff = RoofFunction(0.0, 0.0, (ROOF_G_EQUAL - ROOF_F).harmonics)
        self.assertLessEqual(cocycle_identity_defect(diff, verdict.transfer, GOLDEN), 1e-6)

    def test_different_jumps_disjoint(self):
        verdict = dichotomy(ROOF_G, ROOF_F, GOLDEN, 64)
        self.assertEqual(verdict.kind, "disjoint")
        self.assertIsNone(verdict.transfer)
        self.assertIn("verdict=disjoint", verdict.to_text())

    def test_opposite_jumps_inconclusive(self):
        up = RoofFunction.from_text("jump=1.0; c0=2.0")
        down = RoofFunction.from_text("jump=-1.0; c0=3.0")
        self.assertEqual(dichotomy(up, down, GOLDEN, 8).kind, "inconclusive")

    def test_different_means_inconclusive(self):
        shifted = RoofFunction.from_text("jump=1.0; c0=1.5; k:1=0.1,0.0")
        verdict = dichotomy(shifted, ROOF_F, GOLDEN, 8)
        self.assertEqual(verdict.kind, "inconclusive")
        self.assertIn("means differ", verdict.reason)

    def test_roof_must_be_positive(self):
        low = RoofFunction.from_text("jump=1.0; c0=-0.5")
        with self.assertRaises(RoofNotPositive):
            dichotomy(low, ROOF_F, GOLDEN, 8)


if __name__ == "__main__":
    unittest.main()
