#!/usr/bin/env python3
"""
Tests for the Hamming-ball difference checker and witness extraction

Run: python -m pytest minirec/tests/test_kleitman.py -v
Or:  python minirec/tests/test_kleitman.py
"""

import os
import sys
import unittest
from fractions import Fraction
from itertools import product

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from minirec.core.bohr import BohrHammingSpec, bh_contains
from minirec.core.errors import CapExceededError, ValidationError
from minirec.core.kleitman import (HammingWitness, KleitmanInstance, Mode, WitnessFailure,
                                   empirical_dimension, hamming_recurrence_witness, kleitman_check,
                                   monotonicity_violations, radius_profile)
from minirec.core.torus import Verdict, make_independent_frequencies
from minirec.core.windows import Window, WindowedSet


class TestKleitmanInstance(unittest.TestCase):
    """Instance validation"""

    def test_min_size(self):
        """ceil(delta k^d)"""
        self.assertEqual(KleitmanInstance(3, 2, "1/3", 1).min_size, 3)
        self.assertEqual(KleitmanInstance(2, 3, "0.3", 1).min_size, 3)

    def test_invalid(self):
        """Bad k, r or delta"""
        with self.assertRaises(ValidationError):
            KleitmanInstance(1, 2, "0.5", 1)
        with self.assertRaises(ValidationError):
            KleitmanInstance(2, 2, "0.5", 3)
        with self.assertRaises(ValidationError):
            KleitmanInstance(2, 2, 0, 1)


class TestExhaustive(unittest.TestCase):
    """Exhaustive scans over subsets of Z_k^d"""

    def test_singleton_counterexample(self):
        """k=2, d=2, delta=1/4: a single point has no pair"""
        result = kleitman_check(KleitmanInstance(2, 2, Fraction(1, 4), 1))
        self.assertFalse(result.holds)
        A, x = result.counterexample
        self.assertEqual(len(A), 1)
        self.assertEqual(len(x), 2)

    def test_full_radius_holds(self):
        """r = d puts every difference in the ball"""
        result = kleitman_check(KleitmanInstance(2, 2, Fraction(1, 2), 2))
        self.assertTrue(result.holds)
        self.assertIsNone(result.counterexample)
        self.assertEqual(result.centers_checked, 4)

    def test_counterexample_is_pair_free(self):
        """The reported A has no a != b with a - b within r of x"""
        inst = KleitmanInstance(3, 2, Fraction(2, 9), 0)
        result = kleitman_check(inst)
        self.assertFalse(result.holds)
        A, x = result.counterexample
        self.assertGreaterEqual(len(A), inst.min_size)
        for a in A:
            for b in A:
                if a == b:
                    continue
                diff = tuple((u - v) % 3 for u, v in zip(a, b))
                self.assertNotEqual(diff, x)

    def test_sizes_and_workers_agree(self):
        """all_sizes and a worker pool give the same answer"""
        inst = KleitmanInstance(3, 2, Fraction(1, 3), 1)
        base = kleitman_check(inst)
        self.assertEqual(kleitman_check(inst, all_sizes=True).holds, base.holds)
        pooled = kleitman_check(inst, workers=2)
        self.assertEqual(pooled.holds, base.holds)
        self.assertEqual(pooled.counterexample, base.counterexample)

    def test_four_cube_half_density(self):
        """k=2, d=4, delta=1/2, r=1: the even-weight vectors avoid every unit difference"""
        result = kleitman_check(KleitmanInstance(2, 4, Fraction(1, 2), 1))
        self.assertFalse(result.holds)
        A, x = result.counterexample
        self.assertEqual(tuple(x), (0, 0, 0, 0))
        even = {w for w in product(range(2), repeat=4) if sum(w) % 2 == 0}
        self.assertEqual({tuple(a) for a in A}, even)
        self.assertEqual(result.centers_checked, 1)
        again = kleitman_check(KleitmanInstance(2, 4, Fraction(1, 2), 1))
        self.assertEqual(again.to_dict(), result.to_dict())

    def test_cap(self):
        """k^d above the cap is refused"""
        with self.assertRaises(CapExceededError):
            kleitman_check(KleitmanInstance(3, 3, "0.5", 1), cap=20)

    def test_timings_only_on_request(self):
        """runtime appears in to_dict only with timings"""
        result = kleitman_check(KleitmanInstance(2, 1, "1/2", 1))
        self.assertNotIn('runtime', result.to_dict())
        self.assertIn('runtime', result.to_dict(timings=True))


class TestSampled(unittest.TestCase):
    """Seeded random trials"""

    def test_sampled_holds(self):
        """r = d holds on every trial"""
        inst = KleitmanInstance(2, 2, "1/2", 2, mode=Mode.SAMPLED, trials=25, seed=4)
        result = kleitman_check(inst)
        self.assertTrue(result.holds)
        self.assertEqual(result.subsets_checked, 25)

    def test_sampled_counterexample(self):
        """A single sampled point is pair-free"""
        inst = KleitmanInstance(2, 2, "1/4", 1, mode="sampled", trials=5)
        result = kleitman_check(inst)
        self.assertFalse(result.holds)
        self.assertEqual(len(result.counterexample[0]), 1)

    def test_reproducible(self):
        """Same seed, same counters"""
        inst = KleitmanInstance(3, 3, "0.2", 1, mode=Mode.SAMPLED, trials=30, seed=11)
        first, second = kleitman_check(inst), kleitman_check(inst)
        self.assertEqual(first.to_dict(), second.to_dict())


class TestProfiles(unittest.TestCase):
    """Radius profiles and the empirical dimension"""

    def test_profile_monotone(self):
        """Holding never switches off as r grows"""
        verdicts = radius_profile(2, 2, "1/2")
        self.assertEqual(sorted(verdicts), [0, 1, 2])
        self.assertTrue(verdicts[2])
        self.assertEqual(monotonicity_violations(verdicts), [])

    def test_violation_detection(self):
        """A drop from True to False is reported"""
        self.assertEqual(monotonicity_violations({0: True, 1: False, 2: True}), [0])

    def test_empirical_dimension(self):
        """k=2, delta=1/2, r=2: fails at d=1, holds at d=2"""
        report = empirical_dimension(2, "1/2", 2, 3)
        self.assertEqual(report['dimension'], 2)
        self.assertFalse(report['rows'][0]['holds'])

    def test_dimension_respects_cap(self):
        """Dimensions past the cap are not scanned"""
        report = empirical_dimension(2, "1/2", 2, 5, cap=8)
        self.assertEqual([row['d'] for row in report['rows']], [1, 2, 3])


class TestWitness(unittest.TestCase):
    """a, b in A with a - b in BH + m"""

    def setUp(self):
        self.freq = make_independent_frequencies(2)

    def test_full_window_witness(self):
        """d=2, k=4, eps=0.9 on [-500, 500], re-verified directly"""
        A = WindowedSet.full(Window(-500, 500))
        witness = hamming_recurrence_witness(self.freq, "0.9", 0, A, 4, 10 ** 4)
        self.assertIsInstance(witness, HammingWitness)
        self.assertNotEqual(witness.a, witness.b)
        self.assertIn(witness.a, A)
        self.assertIn(witness.b, A)
        spec = BohrHammingSpec(self.freq, "0.9", "0.9", shift=0)
        self.assertIs(bh_contains(spec, witness.a - witness.b), Verdict.YES)
        self.assertEqual(witness.radius, 1)

    def test_witness_grid(self):
        """Ten configurations with d <= 3, k <= 5, eps >= 1/2 on a full window all re-verify"""
        A = WindowedSet.full(Window(-5000, 5000))
        rng = np.random.default_rng(17)
        configs = [(1, 4, "1"), (1, 5, "1"), (2, 4, "0.8"), (2, 4, "0.9"), (2, 5, "0.7"),
                   (2, 5, "0.9"), (3, 4, "0.8"), (3, 4, "0.9"), (3, 5, "0.7"), (3, 5, "0.9")]
        for d, k, eps in configs:
            freq = make_independent_frequencies(d)
            m = int(rng.integers(-50, 51))
            witness = hamming_recurrence_witness(freq, eps, m, A, k, 2000)
            label = f"d={d}, k={k}, eps={eps}, m={m}"
            self.assertIsInstance(witness, HammingWitness, label)
            self.assertNotEqual(witness.a, witness.b, label)
            self.assertIn(witness.a, A)
            self.assertIn(witness.b, A)
            spec = BohrHammingSpec(freq, eps, eps, shift=m)
            self.assertIs(bh_contains(spec, witness.a - witness.b), Verdict.YES, label)

    def test_small_k_rejected(self):
        """k eps must exceed 3"""
        A = WindowedSet.full(Window(-50, 50))
        with self.assertRaises(ValidationError):
            hamming_recurrence_witness(self.freq, "0.5", 0, A, 4, 100)

    def test_translate_failure(self):
        """A window narrower than the embedding reports the translate stage"""
        A = WindowedSet.full(Window(0, 3))
        outcome = hamming_recurrence_witness(self.freq, "0.9", 0, A, 4, 10 ** 4)
        self.assertIsInstance(outcome, WitnessFailure)
        self.assertEqual(outcome.stage, "translate")

    def test_embedding_failure(self):
        """A tiny search bound fails at the embedding stage"""
        A = WindowedSet.full(Window(-50, 50))
        outcome = hamming_recurrence_witness(self.freq, "0.9", 0, A, 4, 2)
        self.assertIsInstance(outcome, WitnessFailure)
        self.assertEqual(outcome.stage, "embedding")


def run_tests():
    """Run all tests"""
    loader = unittest.TestLoader()
    suite = unittest.TestSuite()

    suite.addTests(loader.loadTestsFromTestCase(TestKleitmanInstance))
    suite.addTests(loader.loadTestsFromTestCase(TestExhaustive))
    suite.addTests(loader.loadTestsFromTestCase(TestSampled))
    suite.addTests(loader.loadTestsFromTestCase(TestProfiles))
    suite.addTests(loader.loadTestsFromTestCase(TestWitness))

    runner = unittest.TextTestRunner(verbosity=2)
    result = runner.run(suite)

    return 0 if result.wasSuccessful() else 1


if __name__ == '__main__':
    sys.exit(run_tests())
