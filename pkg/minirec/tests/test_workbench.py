#!/usr/bin/env python3
"""
Tests for configuration, artifact storage, the workbench and the CLI

Run: python -m pytest minirec/tests/test_workbench.py -v
Or:  python minirec/tests/test_workbench.py
"""

import copy
import dataclasses
import io
import json
import os
import shutil
import sys
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from fractions import Fraction

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from minirec.core.cli import main
from minirec.core.config import Caps, RunConfig, get_schema
from minirec.core.errors import CapExceededError, ConfigError
from minirec.core.windows import Window
from minirec.core.workbench import Workbench, result_name
from minirec.storage import ArtifactStore, read_csv, read_json


class TestRunConfig(unittest.TestCase):
    """Schema validation and source precedence"""

    def test_defaults_and_conversion(self):
        """Strings become exact values; defaults fill the rest"""
        config = RunConfig.from_sources('bohr', 'enumerate',
                                        flag_values={'freq': 'sqrt(2)', 'eta': '0.15', 'window': '0:10'})
        self.assertEqual(config['eta'], Fraction(3, 20))
        self.assertEqual(config['window'], Window(0, 10))
        self.assertEqual(config.workers, 1)
        self.assertFalse(config.timings)

    def test_flags_override_file(self):
        """Flag values win over config file values"""
        config = RunConfig.from_sources('bohr', 'enumerate',
                                        {'d': 1, 'eta': '0.2', 'window': [0, 5]},
                                        {'eta': '0.1', 'window': None})
        self.assertEqual(config['eta'], Fraction(1, 10))
        self.assertEqual(config['window'], Window(0, 5))

    def test_unknown_field(self):
        """Keys outside the schema are rejected"""
        with self.assertRaises(ConfigError):
            RunConfig.from_sources('bohr', 'enumerate', {'d': 1, 'eta': '0.2', 'window': '0:5', 'colour': 1})

    def test_missing_required(self):
        """Required fields must be present"""
        with self.assertRaises(ConfigError) as ctx:
            RunConfig.from_sources('bohr', 'enumerate', {'d': 1, 'window': '0:5'})
        self.assertEqual(ctx.exception.field, 'eta')

    def test_bad_values(self):
        """Inverted windows, unknown choices and low precision"""
        base = {'d': 1, 'eta': '0.2', 'window': '0:5'}
        for key, value in [('window', '5:1'), ('precision_bits', 8), ('workers', 0)]:
            with self.assertRaises(ConfigError, msg=key):
                RunConfig.from_sources('bohr', 'enumerate', dict(base, **{key: value}))
        with self.assertRaises(ConfigError):
            RunConfig.from_sources('kronecker', 'solve', {'d': 1, 'target': '0', 'eps': '0.1',
                                                           'strategy': 'annealing'})

    def test_mismatched_command(self):
        """A config declaring another subcommand is refused"""
        with self.assertRaises(ConfigError):
            RunConfig.from_sources('bohr', 'enumerate', {'command': 'bh', 'action': 'enumerate'})

    def test_caps(self):
        """Caps merge over their defaults; unknown caps are errors"""
        config = RunConfig.from_sources('kleitman', 'dimension',
                                        {'k': 2, 'delta': '1/2', 'r': 1, 'caps': {'kleitman_cap': 64}})
        self.assertEqual(config.caps.kleitman_cap, 64)
        self.assertEqual(config.caps.select_cap, Caps().select_cap)
        with self.assertRaises(ConfigError):
            Caps.from_dict({'bogus': 1})

    def test_unknown_subcommand(self):
        """Only registered command/action pairs have schemas"""
        with self.assertRaises(ConfigError):
            get_schema('bohr', 'explode')


class TestArtifactStore(unittest.TestCase):
    """JSON and CSV artifacts"""

    def setUp(self):
        self.test_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.test_dir, ignore_errors=True)

    def test_json_round_trip(self):
        """Fractions survive; keys are sorted"""
        store = ArtifactStore(self.test_dir)
        path = store.write_json('r.json', {'b': Fraction(1, 3), 'a': [1, 2]})
        self.assertEqual(read_json(path), {'a': [1, 2], 'b': Fraction(1, 3)})
        with open(path) as f:
            text = f.read()
        self.assertLess(text.index('"a"'), text.index('"b"'))
        self.assertEqual(store.written, [path])

    def test_csv_columns(self):
        """Floats are written with repr"""
        store = ArtifactStore(self.test_dir)
        path = store.write_csv('t.csv', ['n', 'value'], [[0, 0.1], [1, 0.25]])
        self.assertEqual(read_csv(path), {'n': ['0', '1'], 'value': ['0.1', '0.25']})

    def test_identical_writes(self):
        """Same data, same bytes"""
        data = {'x': Fraction(2, 7), 'rows': [[1, 0.5]]}
        first = ArtifactStore(os.path.join(self.test_dir, 'a')).write_json('r.json', data)
        second = ArtifactStore(os.path.join(self.test_dir, 'b')).write_json('r.json', data)
        with open(first, 'rb') as f1, open(second, 'rb') as f2:
            self.assertEqual(f1.read(), f2.read())

    def test_plain_dataclass_store(self):
        """A store holds only its directory and file list; rewrites are listed once"""
        store = ArtifactStore(self.test_dir)
        store.write_json('r.json', {'x': 1})
        store.write_json('r.json', {'x': 2})
        store.write_csv('t.csv', ['n'], [[0]])
        self.assertEqual([f.name for f in dataclasses.fields(store)], ['output_dir', 'written'])
        self.assertEqual(store.written, [store.path('r.json'), store.path('t.csv')])
        self.assertEqual(copy.deepcopy(store), store)


class TestWorkbench(unittest.TestCase):
    """Subcommands run through the library entry point"""

    def setUp(self):
        self.test_dir = tempfile.mkdtemp()
        self.bench = Workbench(self.test_dir)

    def tearDown(self):
        shutil.rmtree(self.test_dir, ignore_errors=True)

    def run_command(self, command, action, **values):
        values.setdefault('output_dir', self.test_dir)
        return self.bench.run(RunConfig.from_sources(command, action, flag_values=values))

    def test_result_names(self):
        """command_action.json, except the ks build stage file"""
        self.assertEqual(result_name('bh', 'check-sumset'), 'bh_check_sumset.json')
        self.assertEqual(result_name('ks', 'build'), 'stages.json')

    def test_bohr_enumerate(self):
        """Members land in the CSV and in the result file"""
        result = self.run_command('bohr', 'enumerate', freq='sqrt(2)', eta='0.15', window='0:10')
        table = read_csv(os.path.join(self.test_dir, 'bohr_enumerate.csv'))
        members = [int(n) for n, flag in zip(table['n'], table['member']) if flag == 'yes']
        self.assertEqual(members, [0, 5, 7, 10])
        self.assertEqual(result.payload['set']['members'], [0, 5, 7, 10])
        self.assertIn(os.path.join(self.test_dir, 'bohr_enumerate.json'), result.artifacts)

    def test_kronecker_solve(self):
        """n = 6 for target 1/2, eps 1/20"""
        result = self.run_command('kronecker', 'solve', freq='sqrt(2)', target='1/2', eps='1/20',
                                  search_bound=10000)
        self.assertEqual(result.payload['n'], 6)

    def test_not_found_is_a_result(self):
        """An exhausted search reports found = false"""
        result = self.run_command('kronecker', 'solve', freq='sqrt(2)', target='1/2', eps='0.0001',
                                  search_bound=3)
        self.assertFalse(result.payload['found'])
        self.assertEqual(result.violations, [])

    def test_cap_exceeded(self):
        """Exhaustive Kleitman scans above the cap raise"""
        with self.assertRaises(CapExceededError):
            self.run_command('kleitman', 'verify', k=3, d=3, delta='1/2', r=1)

    def test_set_expressions(self):
        """density estimate on multiples of 3"""
        result = self.run_command('density', 'estimate', set='ap(0,3)', window='0:2999', blocks='10,100,1000')
        self.assertLess(abs(float(Fraction(result.payload['estimate'])) - 1 / 3), 0.01)

    def test_timings_flag(self):
        """runtime only appears with timings"""
        self.run_command('kleitman', 'verify', k=2, d=1, delta='1/2', r=1)
        document = read_json(os.path.join(self.test_dir, 'kleitman_verify.json'))
        self.assertNotIn('runtime', document)
        self.run_command('kleitman', 'verify', k=2, d=1, delta='1/2', r=1, timings=True)
        document = read_json(os.path.join(self.test_dir, 'kleitman_verify.json'))
        self.assertIn('runtime', document)

    def test_verify_recomputed_result(self):
        """Results without pointwise claims are recomputed"""
        self.run_command('bh', 'check-sumset', freq='sqrt(2)', eps='0.2', eta_frac='0.5', window='-50:50')
        verdict = self.bench.verify(os.path.join(self.test_dir, 'bh_check_sumset.json'))
        self.assertEqual(verdict.violations, [])

    def test_verify_detects_tampering(self):
        """A member removed from the result file is reported"""
        self.run_command('bohr', 'enumerate', freq='sqrt(2)', eta='0.15', window='0:10')
        path = os.path.join(self.test_dir, 'bohr_enumerate.json')
        with open(path) as f:
            document = json.load(f)
        document['result']['set']['members'].remove(5)
        with open(path, 'w') as f:
            json.dump(document, f)
        self.assertTrue(self.bench.verify(path).violations)


class TestCommandLine(unittest.TestCase):
    """minirec <command> <action> ..."""

    def setUp(self):
        self.test_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.test_dir, ignore_errors=True)

    def cli(self, *argv):
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = main(list(argv))
        return code, out.getvalue(), err.getvalue()

    def test_bohr_enumerate(self):
        """Exit 0 and the member list in the CSV"""
        code, out, _ = self.cli('bohr', 'enumerate', '--freq', 'sqrt(2)', '--eta', '0.15',
                                '--window', '0:10', '-o', self.test_dir)
        self.assertEqual(code, 0)
        self.assertIn('4 members', out)
        table = read_csv(os.path.join(self.test_dir, 'bohr_enumerate.csv'))
        self.assertEqual(table['member'].count('yes'), 4)

    def test_negative_window(self):
        """--window=-5:5 reaches the schema intact"""
        code, _, _ = self.cli('bohr', 'enumerate', '--d', '1', '--eta', '0.6', '--window=-5:5',
                              '-o', self.test_dir)
        self.assertEqual(code, 0)
        document = read_json(os.path.join(self.test_dir, 'bohr_enumerate.json'))
        self.assertEqual(len(document['result']['set']['members']), 11)

    def test_kleitman_counterexample(self):
        """A counterexample is a normal outcome"""
        code, out, _ = self.cli('kleitman', 'verify', '--k', '2', '--d', '2', '--delta', '1/4', '--r', '1',
                                '-o', self.test_dir)
        self.assertEqual(code, 0)
        self.assertIn('counterexample', out)
        path = os.path.join(self.test_dir, 'kleitman_verify.json')
        self.assertEqual(self.cli('--verify', path)[0], 0)

    def test_exit_codes(self):
        """2 for validation errors, 4 for exceeded caps"""
        code, _, err = self.cli('bohr', 'enumerate', '--d', '1', '--eta', '0.1', '--window', '5:1',
                                '-o', self.test_dir)
        self.assertEqual(code, 2)
        self.assertIn('window', err)
        code, _, _ = self.cli('kleitman', 'verify', '--k', '3', '--d', '3', '--delta', '1/2', '--r', '1',
                              '-o', self.test_dir)
        self.assertEqual(code, 4)
        code, _, _ = self.cli('bohr', 'enumerate', '--freq', 'sqrt(', '--eta', '0.1', '--window', '0:3',
                              '-o', self.test_dir)
        self.assertEqual(code, 2)

    def test_missing_action(self):
        """A bare command prints help and exits 2"""
        self.assertEqual(self.cli('bohr')[0], 2)

    def test_config_file(self):
        """Config file values with a flag override"""
        path = os.path.join(self.test_dir, 'run.json')
        with open(path, 'w') as f:
            json.dump({'command': 'kronecker', 'action': 'solve', 'freq': ['sqrt(2)'],
                       'target': ['1/2'], 'eps': '1/20', 'search_bound': 5}, f)
        code, _, _ = self.cli('kronecker', 'solve', '-c', path, '--search-bound', '10000', '-o', self.test_dir)
        self.assertEqual(code, 0)
        document = read_json(os.path.join(self.test_dir, 'kronecker_solve.json'))
        self.assertEqual(document['result']['n'], 6)
        self.assertEqual(document['config']['search_bound'], 10000)

    def test_identical_runs(self):
        """Two runs write byte-identical result files"""
        outputs = []
        for name in ('a', 'b'):
            target = os.path.join(self.test_dir, name)
            self.cli('bh', 'enumerate', '--d', '2', '--eps', '0.15', '--eta-frac', '1/2',
                     '--window=-40:40', '-o', target)
            with open(os.path.join(target, 'bh_enumerate.json'), 'rb') as f:
                outputs.append(f.read())
        self.assertEqual(outputs[0], outputs[1])


def run_tests():
    """Run all tests"""
    loader = unittest.TestLoader()
    suite = unittest.TestSuite()

    suite.addTests(loader.loadTestsFromTestCase(TestRunConfig))
    suite.addTests(loader.loadTestsFromTestCase(TestArtifactStore))
    suite.addTests(loader.loadTestsFromTestCase(TestWorkbench))
    suite.addTests(loader.loadTestsFromTestCase(TestCommandLine))

    runner = unittest.TextTestRunner(verbosity=2)
    result = runner.run(suite)

    return 0 if result.wasSuccessful() else 1


if __name__ == '__main__':
    sys.exit(run_tests())
