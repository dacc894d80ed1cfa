#!/usr/bin/env python3
"""
Tests for the nested-interval construction

Covers:
- Cantor-type interval families and their consistency checks
- Stage measures, L1 character distances and rigidity rows
- Q_(f,k) sets and the Kronecker condition on finite point sets
- Single refinement stages and the shrink certificate
- The full multi-target pipeline

Run: python -m pytest minirec/tests/test_construction.py -v
Or:  python minirec/tests/test_construction.py
"""

import math
import os
import sys
import unittest
from fractions import Fraction

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from minirec.core.config import Caps
from minirec.core.construction import (DiscreteMeasure, IntervalFamily, ancestor, build_cantor,
                                       build_chain, build_ks_pipeline, certified_radius,
                                       character_phase, check_families, continuity_check,
                                       kronecker_condition, l1_char_distance, q_containment, q_set,
                                       refine_stage, rigidity_profile, stage_bound_check,
                                       stage_measure)
from minirec.core.errors import PrecisionError, ValidationError
from minirec.core.torus import Arc, TorusPoint, make_independent_frequencies
from minirec.core.windows import Window, WindowedSet


class TestCantorFamilies(unittest.TestCase):
    """Nested families with fixed branching"""

    def setUp(self):
        self.families = build_cantor([2, 2])

    def test_sizes(self):
        """1, 2 and 4 intervals"""
        self.assertEqual([len(f) for f in self.families], [1, 2, 4])
        self.assertEqual(self.families[1].intervals[0], Arc(Fraction(1, 9), Fraction(4, 9)))

    def test_families_are_consistent(self):
        """Nesting, branching, shrinking and disjointness all hold"""
        self.assertEqual(check_families(self.families), [])

    def test_ancestor(self):
        """Stage 2 interval 3 sits in stage 1 interval 1"""
        self.assertEqual(ancestor(self.families, 2, 3, 1), 1)
        self.assertEqual(ancestor(self.families, 2, 0, 0), 0)

    def test_measure_continuity(self):
        """Each stage 1 interval carries mass 1/2 under every later measure"""
        measures = [stage_measure(f) for f in self.families]
        self.assertEqual(continuity_check(self.families, measures), [])
        self.assertEqual(measures[2].mass_of(self.families[1].intervals[1]), Fraction(1, 2))

    def test_broken_nesting_detected(self):
        """A child outside its parent is reported"""
        bad = IntervalFamily(1, [Arc(0, Fraction(1, 8)), Arc(Fraction(1, 2), Fraction(1, 2) + Fraction(1, 8))],
                             [0, 0], 2)
        parent = IntervalFamily(0, [Arc(0, Fraction(1, 4))], [-1], 1)
        self.assertTrue(check_families([parent, bad]))

    def test_invalid_parameters(self):
        """Branching below 2 and shrink outside (0, 1)"""
        with self.assertRaises(ValidationError):
            build_cantor([1])
        with self.assertRaises(ValidationError):
            build_cantor([2], shrink=1)

    def test_point_outside_interval(self):
        """stage_measure rejects misplaced atoms"""
        with self.assertRaises(ValidationError):
            stage_measure(self.families[1], [Fraction(1, 2), Fraction(2, 3)])


class TestCharacterDistances(unittest.TestCase):
    """L1 distances against measures"""

    def setUp(self):
        half = Fraction(1, 2)
        self.mu = DiscreteMeasure([(TorusPoint.of(0), half), (TorusPoint.of(half), half)])

    def test_constant_against_first_character(self):
        """Atoms at 0 and 1/2: ||1 - e_1|| = 1"""
        value = l1_char_distance(self.mu, lambda i, x: 0, 1)
        self.assertAlmostEqual(float(value), 1.0, places=12)

    def test_character_against_itself(self):
        """||e_m - e_m|| = 0"""
        value = l1_char_distance(self.mu, character_phase(3), 3)
        self.assertAlmostEqual(float(value), 0.0, places=12)

    def test_rigidity_rows(self):
        """s = m gives 0; rows carry their bound verdicts"""
        rows = rigidity_profile([4, 5], self.mu, 4, [Fraction(1, 2), Fraction(1, 2)])
        self.assertEqual(rows[0]['value'], 0.0)
        self.assertTrue(rows[0]['ok'])
        self.assertAlmostEqual(rows[1]['value'], 1.0, places=12)
        self.assertFalse(rows[1]['ok'])


class TestQSets(unittest.TestCase):
    """Q_(f,k) and the Kronecker condition"""

    def setUp(self):
        self.family = build_cantor([2])[1]

    def test_k_one_keeps_everything(self):
        """Lambda_1 = {0} puts all of S in Q"""
        S = WindowedSet.full(Window(-5, 5))
        self.assertEqual(q_set(self.family, [0, 0], 1, S).members, S.members)

    def test_zero_is_in_constant_phase_set(self):
        """n = 0 matches the constant function 1"""
        S = WindowedSet.full(Window(-5, 5))
        self.assertIn(0, q_set(self.family, [0, 0], 2, S))

    def test_phase_count_checked(self):
        """One phase per interval"""
        with self.assertRaises(ValidationError):
            q_set(self.family, [0], 2, WindowedSet.full(Window(0, 3)))

    def test_independent_points(self):
        """sqrt 2 and sqrt 3 meet every f into {1, -1}"""
        report = kronecker_condition(make_independent_frequencies(2).entries, 2, Window(-2000, 2000))
        self.assertTrue(report.holds)
        self.assertEqual(len(report.witnesses), 4)
        self.assertEqual(report.witnesses[(0, 0)], 0)

    def test_zero_point_fails(self):
        """x = 0 can never approximate -1"""
        report = kronecker_condition([0], 2, Window(-100, 100))
        self.assertFalse(report.holds)
        self.assertEqual(report.missing, [(1,)])


class TestRefinement(unittest.TestCase):
    """One stage of the construction"""

    def test_certified_radius(self):
        """Selection up to 7 at k = 2: radius below 1/(8 pi 7)"""
        radius, cert = certified_radius(2, [5, 7])
        self.assertGreater(radius, 0)
        self.assertLess(radius, 1 / (8 * math.pi * 7))
        self.assertTrue(cert['holds'])
        self.assertEqual(cert['n_max'], 7)

    def test_radius_ceiling(self):
        """A ceiling caps the radius"""
        radius, _ = certified_radius(1, [1], ceiling=Fraction(1, 1000))
        self.assertEqual(radius, Fraction(1, 1000))

    def test_uncertifiable_radius(self):
        """Too little precision for a large n"""
        with self.assertRaises(PrecisionError):
            certified_radius(2, [10 ** 6], precision_bits=8)

    def test_first_stage(self):
        """Stage 1 from [0, 1]: two disjoint children and a certified radius"""
        start = IntervalFamily(0, [Arc(0, 1)], [-1], 1)
        S = WindowedSet.full(Window(-200, 200))
        record, family = refine_stage(start, 1, S, Caps(), branching=2)
        self.assertEqual(len(family), 2)
        self.assertEqual(check_families([start, family]), [])
        self.assertTrue(record.certificate['holds'])
        self.assertEqual(record.selection[0], 0)
        self.assertLessEqual(len(record.selection), Caps().select_cap)
        self.assertEqual(q_containment(record, family), [])

    def test_stage_bound_rows(self):
        """One row per built measure, each under 3/k"""
        start = IntervalFamily(0, [Arc(0, 1)], [-1], 1)
        S = WindowedSet.full(Window(-200, 200))
        record, family = refine_stage(start, 1, S, Caps(), branching=2)
        families = [start, family]
        measures = [stage_measure(f) for f in families]
        entry = record.psi_table[0]
        rows = stage_bound_check(families, measures, record, entry.psi, entry.selection[0])
        self.assertEqual([row['measure_stage'] for row in rows], [1])
        self.assertTrue(all(row['ok'] for row in rows))
        self.assertEqual(rows[0]['bound'], "3")

    def test_stage_index_positive(self):
        """k = 0 is rejected"""
        start = IntervalFamily(0, [Arc(0, 1)], [-1], 1)
        with self.assertRaises(ValidationError):
            refine_stage(start, 0, WindowedSet.full(Window(0, 5)), Caps())


class TestPipeline(unittest.TestCase):
    """Nested sets and the diagonal S'"""

    def test_all_integers(self):
        """S = all on [-3000, 3000], target 0, two stages"""
        S = WindowedSet.full(Window(-3000, 3000))
        report = build_ks_pipeline(S, [0], 2, Caps())
        self.assertEqual(report.violations, [])
        self.assertTrue(report.diagonal)
        self.assertTrue(set(report.diagonal) <= set(S.members))
        self.assertEqual(len(report.diagonal), len(set(report.diagonal)))
        self.assertEqual(len(report.chains[0].families), 3)
        self.assertTrue(any(row['kind'] == 'diagonal' for row in report.profile))

    def test_nested_sets_shrink(self):
        """Each S_t lies inside S_(t-1)"""
        S = WindowedSet(Window(-2000, 2000), tuple(range(-2000, 2001, 3)))
        caps = Caps(falsify=False)
        report = build_ks_pipeline(S, [0, 3], 1, caps)
        self.assertEqual(report.violations, [])
        sizes = [entry['size'] for entry in report.nested_sets]
        self.assertEqual(len(sizes), 2)
        self.assertGreaterEqual(sizes[0], sizes[1])
        self.assertTrue(all(n % 3 == 0 for n in report.diagonal))

    def test_three_stages_wide_window(self):
        """S = all on [-10^5, 10^5], three stages, at most three points per stage"""
        S = WindowedSet.full(Window(-10 ** 5, 10 ** 5))
        report = build_ks_pipeline(S, [0], 3, Caps(max_points=3))
        self.assertEqual(report.violations, [])
        chain = report.chains[0]
        self.assertEqual(len(chain.records), 3)
        self.assertTrue(all(record.certificate['holds'] for record in chain.records))
        self.assertTrue(all(len(f) <= 3 for f in chain.families))
        self.assertTrue(report.stage_bounds)
        self.assertTrue(all(row['ok'] for row in report.stage_bounds))

    def test_reduced_branching_reported(self):
        """Stages held to one child per interval are logged and listed as gaps"""
        S = WindowedSet.full(Window(-3000, 3000))
        with self.assertLogs('minirec.core.construction', level='WARNING') as logs:
            chain = build_chain(S, 0, 3, Caps(max_points=3))
        self.assertEqual(chain.reduced, [2, 3])
        self.assertEqual([len(f) for f in chain.families], [1, 2, 2, 2])
        self.assertIn("branching reduced to 1", logs.output[0])
        self.assertEqual(chain.to_dict()['reduced_stages'], [2, 3])
        report = build_ks_pipeline(S, [0], 3, Caps(max_points=3, falsify=False))
        self.assertEqual(sum("branching 1" in gap for gap in report.gaps), 2)

    def test_empty_set_rejected(self):
        """S must have members"""
        with self.assertRaises(ValidationError):
            build_ks_pipeline(WindowedSet(Window(0, 5), ()), [0], 1, Caps())


def run_tests():
    """Run all tests"""
    loader = unittest.TestLoader()
    suite = unittest.TestSuite()

    suite.addTests(loader.loadTestsFromTestCase(TestCantorFamilies))
    suite.addTests(loader.loadTestsFromTestCase(TestCharacterDistances))
    suite.addTests(loader.loadTestsFromTestCase(TestQSets))
    suite.addTests(loader.loadTestsFromTestCase(TestRefinement))
    suite.addTests(loader.loadTestsFromTestCase(TestPipeline))

    runner = unittest.TextTestRunner(verbosity=2)
    result = runner.run(suite)

    return 0 if result.wasSuccessful() else 1


if __name__ == '__main__':
    sys.exit(run_tests())
