#!/usr/bin/env python3
"""
Tests for Kronecker approximation, group embeddings and translate search

Run: python -m pytest minirec/tests/test_diophantine.py -v
Or:  python minirec/tests/test_diophantine.py
"""

import os
import sys
import unittest
from fractions import Fraction
from unittest import mock

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from minirec.core.diophantine import (ApproxQuery, EmbeddingTable, Strategy, embed_group,
                                      find_translate, kronecker_approximate)
from minirec.core.errors import CapExceededError, NotFound, ValidationError
from minirec.core.torus import FrequencyVector, make_independent_frequencies, orbit_norms
from minirec.core.windows import Window, WindowedSet


class TestKroneckerApproximate(unittest.TestCase):
    """max_j ||n alpha_j - z_j|| < eps"""

    def setUp(self):
        self.sqrt2 = make_independent_frequencies(1)

    def test_zero_target(self):
        """Target 0 with 0 allowed gives n = 0"""
        result = kronecker_approximate(ApproxQuery(self.sqrt2, [0], "0.1", 100))
        self.assertEqual(result.n, 0)

    def test_half_target(self):
        """Target 1/2, eps 1/20 gives n = 6"""
        result = kronecker_approximate(ApproxQuery(self.sqrt2, ["1/2"], Fraction(1, 20), 10 ** 4))
        self.assertEqual(result.n, 6)
        self.assertLess(result.max_norm, 0.05)

    def test_zero_excluded(self):
        """Target 0 with n >= 1 required gives n = 5"""
        query = ApproxQuery(self.sqrt2, [0], "0.1", 10 ** 4, exclude_zero=True)
        self.assertEqual(kronecker_approximate(query).n, 5)

    def test_not_found_reports_best(self):
        """An exhausted bound raises NotFound with the closest n"""
        with self.assertRaises(NotFound) as ctx:
            kronecker_approximate(ApproxQuery(self.sqrt2, ["1/2"], "0.001", 5))
        self.assertIsNotNone(ctx.exception.best_n)
        self.assertLessEqual(abs(ctx.exception.best_n), 5)

    def test_lattice_matches_named_examples(self):
        """The lattice strategy returns verified solutions of the same queries"""
        for target, eps in ((["1/2"], Fraction(1, 20)), ([0], Fraction(1, 10))):
            query = ApproxQuery(self.sqrt2, target, eps, 10 ** 4, Strategy.LATTICE, exclude_zero=True)
            result = kronecker_approximate(query)
            yes, _ = orbit_norms(self.sqrt2, [result.n], target).below(eps)
            self.assertTrue(yes.all())
            self.assertNotEqual(result.n, 0)

    def test_lattice_falls_back_when_candidates_fail(self):
        """A lattice candidate that misses the target hands over to the exhaustive scan"""
        query = ApproxQuery(self.sqrt2, ["1/2"], Fraction(1, 20), 10 ** 4, Strategy.LATTICE)
        with mock.patch("minirec.core.diophantine._lattice_candidates", return_value=[1]):
            result = kronecker_approximate(query)
        self.assertEqual(result.n, 6)
        self.assertEqual(result.strategy, "lattice+exhaustive-fallback")

    def test_lattice_fallback_unsolvable(self):
        """alpha = 1/2 never comes within 1/10 of 1/4; the fallback reports NotFound"""
        freq = FrequencyVector.rational(["1/2"])
        with self.assertRaises(NotFound):
            kronecker_approximate(ApproxQuery(freq, ["1/4"], "0.1", 500, Strategy.LATTICE))

    def test_strategies_agree_on_solvability(self):
        """Random queries: both strategies solve or both fail"""
        freq = make_independent_frequencies(2)
        rng = np.random.default_rng(3)
        for _ in range(20):
            target = [Fraction(int(v), 1000) for v in rng.integers(0, 1000, size=2)]
            eps = Fraction(int(rng.integers(5, 60)), 1000)
            outcomes = []
            for strategy in (Strategy.EXHAUSTIVE, Strategy.LATTICE):
                try:
                    result = kronecker_approximate(ApproxQuery(freq, target, eps, 2000, strategy))
                    yes, _ = orbit_norms(freq, [result.n], target).below(eps)
                    self.assertTrue(yes.all())
                    outcomes.append(True)
                except NotFound:
                    outcomes.append(False)
            self.assertEqual(outcomes[0], outcomes[1], f"target={target}, eps={eps}")

    def test_validation(self):
        """Dimension mismatch and non-positive eps"""
        with self.assertRaises(ValidationError):
            ApproxQuery(self.sqrt2, [0, 0], "0.1", 10)
        with self.assertRaises(ValidationError):
            ApproxQuery(self.sqrt2, [0], 0, 10)
        with self.assertRaises(ValidationError):
            Strategy.parse("annealing")


class TestEmbedGroup(unittest.TestCase):
    """Injective embeddings of Z_k^d"""

    def test_one_dimensional(self):
        """k = 2, eps = 1/20: w = 0 maps to 0 and w = 1 to 6"""
        table = embed_group(make_independent_frequencies(1), 2, Fraction(1, 20), 10 ** 4)
        self.assertEqual(table[(0,)], 0)
        self.assertEqual(table[(1,)], 6)

    def test_injective_two_dimensional(self):
        """k = 2, d = 2 gives four distinct integers passing the re-check"""
        freq = make_independent_frequencies(2)
        table = embed_group(freq, 2, Fraction(1, 10), 10 ** 5)
        self.assertEqual(len(table.mapping), 4)
        self.assertEqual(len(set(table.values())), 4)
        self.assertEqual(table.check(freq), [])

    def test_serialization(self):
        """Tables survive to_dict/from_dict"""
        table = embed_group(make_independent_frequencies(1), 3, Fraction(1, 10), 10 ** 4)
        again = EmbeddingTable.from_dict(table.to_dict())
        self.assertEqual(again.mapping, table.mapping)
        self.assertEqual(again.eps, table.eps)

    def test_cap(self):
        """k^d beyond the cap is refused"""
        with self.assertRaises(CapExceededError):
            embed_group(make_independent_frequencies(2), 10, "0.1", 100, cap=50)


class TestFindTranslate(unittest.TestCase):
    """argmax_t |(A + t) & F|"""

    def test_full_window(self):
        """A = every integer: count = |F|"""
        A = WindowedSet.full(Window(-50, 50))
        t, count = find_translate(A, [3, 9, 20])
        self.assertEqual(count, 3)
        self.assertEqual(t, 0)

    def test_even_numbers(self):
        """A = evens, F = {0, 2, 4}: an even t with count 3"""
        A = WindowedSet(Window(-100, 100), tuple(range(-100, 101, 2)))
        t, count = find_translate(A, [0, 2, 4])
        self.assertEqual(count, 3)
        self.assertEqual(t % 2, 0)

    def test_multiples_of_three(self):
        """A = 3Z, F = {0..8}: count 3"""
        A = WindowedSet(Window(-300, 300), tuple(range(-300, 301, 3)))
        _, count = find_translate(A, range(9))
        self.assertEqual(count, 3)

    def test_window_too_small(self):
        """F wider than the window cannot be slid"""
        with self.assertRaises(ValidationError):
            find_translate(WindowedSet.full(Window(0, 3)), [0, 10])


def run_tests():
    """Run all tests"""
    loader = unittest.TestLoader()
    suite = unittest.TestSuite()

    suite.addTests(loader.loadTestsFromTestCase(TestKroneckerApproximate))
    suite.addTests(loader.loadTestsFromTestCase(TestEmbedGroup))
    suite.addTests(loader.loadTestsFromTestCase(TestFindTranslate))

    runner = unittest.TextTestRunner(verbosity=2)
    result = runner.run(suite)

    return 0 if result.wasSuccessful() else 1


if __name__ == '__main__':
    sys.exit(run_tests())
