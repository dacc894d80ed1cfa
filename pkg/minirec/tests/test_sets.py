#!/usr/bin/env python3
"""
Tests for the set expression language

Covers:
- Lexer tokens and positioned parse errors
- Parsing, printing and re-parsing expressions
- Frequency terms such as 1/4+sqrt(5)/8
- Evaluation over windows, including file imports and Bohr complements

Run: python -m pytest minirec/tests/test_sets.py -v
Or:  python minirec/tests/test_sets.py
"""

import json
import os
import shutil
import sys
import tempfile
import unittest
from fractions import Fraction

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from minirec.core.errors import ValidationError
from minirec.core.sets import SetEvaluator
from minirec.core.windows import Window
from minirec.parser import FreqTerm, Lexer, ParseError, TokenType, parse_frequency, parse_set
from minirec.parser.parser import AllIntegers, Progression, Shifted, Squares, Union


class TestLexer(unittest.TestCase):
    """Tokenizer"""

    def test_keywords_are_case_insensitive(self):
        """AP and ap are the same keyword"""
        types = [t.type for t in Lexer("AP(0, 3)").tokenize()]
        self.assertEqual(types[0], TokenType.AP)
        self.assertEqual(types[-1], TokenType.EOF)

    def test_unexpected_character(self):
        """Stray characters are rejected with a position"""
        with self.assertRaises(ParseError) as ctx:
            Lexer("ap(0,3) @").tokenize()
        self.assertIn("column", str(ctx.exception))

    def test_unterminated_string(self):
        """file("... without a closing quote"""
        with self.assertRaises(ParseError):
            Lexer('file("a.json').tokenize()


class TestParser(unittest.TestCase):
    """Expressions to ASTs"""

    def test_primaries(self):
        """Simple forms"""
        self.assertEqual(parse_set("all"), AllIntegers())
        self.assertEqual(parse_set("squares"), Squares())
        self.assertEqual(parse_set("ap(-1, 4)"), Progression(-1, 4))

    def test_shift_and_union(self):
        """'+ m' shifts and '|' unions"""
        self.assertEqual(parse_set("squares + 2"), Shifted(Squares(), 2))
        self.assertEqual(parse_set("ap(0,2) | ap(1,4) - 3"),
                         Union((Progression(0, 2), Shifted(Progression(1, 4), -3))))

    def test_printing_reparses(self):
        """str(expr) parses back to the same expression"""
        for text in ["ap(0,3)", "union(ap(0,5),{1,2})", "shift(squares,-7)",
                     "bohr([sqrt(2), 1/4+sqrt(5)/8], 0.1)", "not_bohr([1/3], 1/5)",
                     'file("sets/a.json")', "{}", "(all | squares) + 1"]:
            expr = parse_set(text)
            self.assertEqual(parse_set(str(expr)), expr, text)

    def test_errors(self):
        """Malformed expressions raise ParseError, itself a ValidationError"""
        for text in ["ap(0,0)", "ap(0,3", "ap(0,3) extra", "bohr([sqrt(2)], 0)",
                     "bohr(sqrt(2), 0.1)", "squares + x", "bohr([1/0], 0.1)"]:
            with self.assertRaises(ValidationError, msg=text):
                parse_set(text)

    def test_frequency_terms(self):
        """Rational, radical and shifted radical forms"""
        self.assertEqual(parse_frequency("1/3"), FreqTerm(Fraction(1, 3)))
        self.assertEqual(parse_frequency("sqrt(2)"), FreqTerm(Fraction(0), 2, 1))
        self.assertEqual(parse_frequency("1/4+sqrt(5)/8"), FreqTerm(Fraction(1, 4), 5, 8))
        with self.assertRaises(ParseError):
            parse_frequency("sqrt(1)")


class TestEvaluator(unittest.TestCase):
    """Membership over windows"""

    def setUp(self):
        self.test_dir = tempfile.mkdtemp()
        self.evaluator = SetEvaluator(self.test_dir)

    def tearDown(self):
        shutil.rmtree(self.test_dir, ignore_errors=True)

    def members(self, text, window):
        return self.evaluator.enumerate(text, Window.parse(window)).members

    def test_progression(self):
        """Multiples of 3 on [-6, 6]"""
        self.assertEqual(self.members("ap(0,3)", "-6:6"), (-6, -3, 0, 3, 6))

    def test_squares(self):
        """Perfect squares; none below 0"""
        self.assertEqual(self.members("squares", "0:30"), (0, 1, 4, 9, 16, 25))
        self.assertEqual(self.members("squares", "-9:-1"), ())
        self.assertTrue(self.evaluator.contains("squares", 10 ** 6))
        self.assertFalse(self.evaluator.contains("squares", 10 ** 6 + 1))

    def test_union_and_shift(self):
        """union(...) and '+ m'"""
        self.assertEqual(self.members("union(ap(0,5),{1,2})", "0:10"), (0, 1, 2, 5, 10))
        self.assertEqual(self.members("ap(0,3) + 1", "0:9"), (1, 4, 7))

    def test_bohr_and_complement(self):
        """bohr and not_bohr split the window"""
        self.assertEqual(self.members("bohr([sqrt(2)], 0.15)", "0:10"), (0, 5, 7, 10))
        self.assertEqual(self.members("not_bohr([sqrt(2)], 0.15)", "0:10"), (1, 2, 3, 4, 6, 8, 9))

    def test_dict_spec(self):
        """{"expr": ...} objects are accepted"""
        self.assertEqual(self.evaluator.enumerate({"expr": "ap(1,2)"}, Window(0, 5)).members, (1, 3, 5))

    def test_json_file_import(self):
        """WindowedSet JSON files"""
        with open(os.path.join(self.test_dir, "a.json"), "w") as f:
            json.dump({"window": [0, 20], "members": [2, 3, 17], "source": "test"}, f)
        self.assertEqual(self.members('file("a.json")', "0:10"), (2, 3))

    def test_text_file_import(self):
        """One integer per line"""
        with open(os.path.join(self.test_dir, "b.txt"), "w") as f:
            f.write("5\n-4\n9\n")
        self.assertEqual(self.members('file("b.txt") + 1', "-10:10"), (-3, 6, 10))

    def test_missing_file(self):
        """Unknown paths are a validation error"""
        with self.assertRaises(ValidationError):
            self.members('file("nope.json")', "0:3")


def run_tests():
    """Run all tests"""
    loader = unittest.TestLoader()
    suite = unittest.TestSuite()

    suite.addTests(loader.loadTestsFromTestCase(TestLexer))
    suite.addTests(loader.loadTestsFromTestCase(TestParser))
    suite.addTests(loader.loadTestsFromTestCase(TestEvaluator))

    runner = unittest.TextTestRunner(verbosity=2)
    result = runner.run(suite)

    return 0 if result.wasSuccessful() else 1


if __name__ == '__main__':
    sys.exit(run_tests())
