"""Unit tests for arc hitting and the three-clause classification."""

import unittest

import numpy as np

from rigidity_lab.arith.circle import frac
from rigidity_lab.arith.diophantine import parse_frequency
from rigidity_lab.dynamics.trichotomy import (
    ArcInterval,
    classify,
    first_hit,
    first_hit_index,
    first_hit_real,
)
from rigidity_lab.errors import ArcTooWide

GOLDEN = parse_frequency("cf:[1]")
SILVER = parse_frequency("cf:[2,...]")


class TestArcInterval(unittest.TestCase):
    """Test the shorter-arc representation."""

    def test_contains_across_origin(self):
        arc = ArcInterval(0.95, 0.02)
        self.assertTrue(arc.contains(0.0))
        self.assertFalse(arc.contains(0.5))

    def test_wide_arc_rejected(self):
        with self.assertRaises(ArcTooWide):
            ArcInterval(0.0, 0.5)

    def test_shift(self):
        arc = ArcInterval(0.1, 0.2).shifted(0.85)
        self.assertTrue(arc.contains(0.0))


class TestFirstHit(unittest.TestCase):
    """Test the first step at which a moved arc covers the target."""

    def test_zero_steps_when_arc_covers_target(self):
        self.assertEqual(first_hit_index(0.99, 0.01, GOLDEN, 10), 0)

    def test_matches_brute_force(self):
        alpha = float(GOLDEN.value())
        rng = np.random.default_rng(5)
        for _ in range(50):
            y = float(rng.random())
            y2 = frac(y + 0.01)
            expected = None
            for i in range(500):
                if ArcInterval(frac(y + i * alpha), frac(y2 + i * alpha)).contains(0.0):
                    expected = i
                    break
            self.assertEqual(first_hit_index(y, y2, GOLDEN, 499), expected)

    def test_backward(self):
        alpha = float(GOLDEN.value())
        y = frac(2 * alpha - 0.001)
        hit = first_hit(y, frac(y + 0.002), GOLDEN, 10, sign=-1)
        self.assertEqual(hit.index, 2)
        self.assertEqual(hit.ambiguous, ())

    def test_no_hit_within_bound(self):
        self.assertIsNone(first_hit_index(0.3, 0.3001, GOLDEN, 0))

    def test_real_time(self):
        j = first_hit_index(0.3, 0.31, GOLDEN, 1000)
        self.assertAlmostEqual(first_hit_real(0.3, 0.31, GOLDEN, 1.5, 1000), 1.5 * j)


class TestTrichotomy(unittest.TestCase):
    """Test that every short arc satisfies one of the three clauses."""

    def test_seeded_arcs(self):
        rng = np.random.default_rng(0)
        for beta in (GOLDEN, SILVER):
            for n in range(2, 9):
                width = 1.0 / (6 * beta.q(n))
                for _ in range(100):
                    y = float(rng.random())
                    dy = (1.0 - float(rng.random())) * width * 0.999
                    verdict = classify(y, frac(y + dy), beta, n)
                    self.assertTrue(verdict.any_holds, (y, dy, n))

    def test_arc_too_wide(self):
        with self.assertRaises(ArcTooWide):
            classify(0.1, 0.3, GOLDEN, 5)

    def test_clause_names(self):
        verdict = classify(0.99999, 0.00001, GOLDEN, 4)
        self.assertTrue(verdict.holds_iii)
        self.assertEqual(verdict.witness_iii, 0)
        self.assertIn("iii", verdict.clauses())

    def test_reversed_sign_reflects_arc(self):
        rng = np.random.default_rng(17)
        for y in rng.random(20):
            y2 = frac(y + 0.004)
            flipped = classify(y, y2, GOLDEN, 6, sign=-1)
            mirror = classify(frac(-y), frac(-y2), GOLDEN, 6)
            self.assertEqual(flipped.clauses(), mirror.clauses(), y)
            self.assertEqual(flipped.witness_ii, mirror.witness_ii, y)
            self.assertEqual(flipped.witness_iii, mirror.witness_iii, y)


if __name__ == "__main__":
    unittest.main()
