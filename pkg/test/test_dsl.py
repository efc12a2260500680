import unittest

from hypothesis import given, settings
from sympy import Rational

from hnfpyalgebra import errors
from hnfpyalgebra.dsl import format_fn, format_interval, format_scalar, parse_fn, tokenize
from hnfpyalgebra.intervals import XInterval, NEG_INF, POS_INF
from hnfpyalgebra.piecewise import pw_build, pw_canon, pw_eval, pw_from_rational
from hnfpyalgebra.rationals import X, rf_normalize
from test.strategies import functions

DOMAIN = (-1, 1)
SIGN = "piecewise on [-1,1] { (-1,0): -1; 0: [-1,1]; (0,1): 1 }"


class TestTokenize(unittest.TestCase):

    def test_kinds_and_positions(self):
        tokens = tokenize("x^2 # square\n  + 1/2")
        self.assertEqual([t.kind for t in tokens], ["NAME", "OP", "NUMBER", "OP", "NUMBER", "OP", "NUMBER", "EOF"])
        plus = tokens[3]
        self.assertEqual((plus.line, plus.column), (2, 3))

    def test_unexpected_character(self):
        with self.assertRaises(errors.ParseError) as ctx:
            tokenize("x @ 1")
        self.assertEqual((ctx.exception.line, ctx.exception.column), (1, 3))


class TestParse(unittest.TestCase):

    def test_piecewise_literal(self):
        f = parse_fn(SIGN)
        self.assertEqual(f, pw_build(DOMAIN, [-1, 0, 1], [-1, (-1, 1), 1], [-1, 1]))

    def test_missing_values_are_completed(self):
        f = parse_fn("piecewise on [-1,1] { (-1,0): -1; (0,1): 1 }")
        self.assertEqual(pw_eval(f, 0), XInterval(-1, 1))
        self.assertEqual(pw_eval(f, -1), XInterval(-1))

    def test_partial_literal(self):
        f = parse_fn("piecewise on [-1,1] { (-1,0): -1; (0,1): 1 }", complete=False)
        self.assertTrue(f.is_partial)

    def test_shorthand_inserts_poles(self):
        f = parse_fn("1/x on [-1,1]")
        self.assertEqual(f, pw_from_rational(rf_normalize(1, X), DOMAIN))
        self.assertEqual(parse_fn("x^-1 on [-1,1]"), f)

    def test_expressions(self):
        f = parse_fn("(x + 1)*(x - 1) / 2 - 0.5*x on [0,1]")
        self.assertEqual(f.segments[0][0], rf_normalize(X ** 2 - X - 1, 2))
        self.assertEqual(parse_fn("-x^2 on [0,1]").segments[0][0], rf_normalize(-X ** 2))
        self.assertEqual(parse_fn("2*3/4 on [0,1]").segments[0][0], rf_normalize(Rational(3, 2)))

    def test_interval_segments(self):
        f = parse_fn("piecewise on [-1,1] { (-1,1): -1 .. 1 }")
        self.assertEqual(f.values, (XInterval(-1, 1), XInterval(-1, 1)))
        self.assertFalse(f.is_quasi_minimal)

    def test_point_entries_split_segments(self):
        f = parse_fn("piecewise on [-1,1] { (-1,1): x; 1/2: [0, 1] }")
        self.assertEqual(f.breakpoints, (-1, Rational(1, 2), 1))
        self.assertEqual(f.values[1], XInterval(0, 1))

    def test_infinite_values(self):
        f = parse_fn("piecewise on [-1,1] { (-1,0): 1/x; 0: [-inf,+inf]; (0,1): 1/x }")
        self.assertEqual(f.values[1], XInterval(NEG_INF, POS_INF))

    def test_comments_and_newlines(self):
        f = parse_fn("# small jump\npiecewise on [-1,1] {\n  (-1,0): 0;\n  (0,1): 1/10;\n}\n")
        self.assertEqual(pw_eval(f, 0), XInterval(0, Rational(1, 10)))


class TestParseErrors(unittest.TestCase):

    def test_syntax_error_position(self):
        with self.assertRaises(errors.ParseError) as ctx:
            parse_fn("piecewise on [-1,1] { (-1,0): -1; (0,1) 1 }")
        self.assertEqual((ctx.exception.line, ctx.exception.column), (1, 41))
        self.assertIn("Expected ':'", str(ctx.exception))

    def test_interior_pole_position(self):
        with self.assertRaises(errors.InteriorPole) as ctx:
            parse_fn("piecewise on [-1,1] { (-1,1): 1/(x) }")
        self.assertTrue(str(ctx.exception).endswith("(line 1, column 23)"))

    def test_segment_order_violation(self):
        with self.assertRaises(errors.SegmentOrderViolation):
            parse_fn("piecewise on [0,1] { (0,1): 1 .. 0 }")

    def test_gaps_and_overlaps(self):
        with self.assertRaises(errors.ParseError):
            parse_fn("piecewise on [0,2] { (0,1): 1 }")
        with self.assertRaises(errors.ParseError):
            parse_fn("piecewise on [0,2] { (0,2): 1; (1,2): 1 }")
        with self.assertRaises(errors.ParseError):
            parse_fn("piecewise on [0,1] { 0: 1 }")

    def test_breakpoint_errors(self):
        with self.assertRaises(errors.ParseError):
            parse_fn("piecewise on [0,1] { (0,1): 1; 0: 1; 0: 1 }")
        with self.assertRaises(errors.OutOfDomain):
            parse_fn("piecewise on [0,1] { (0,1): 1; 2: 1 }")
        with self.assertRaises(errors.UnsortedBreakpoints):
            parse_fn("piecewise on [0,1] { (1,0): 1 }")
        with self.assertRaises(errors.UnsortedBreakpoints):
            parse_fn("x on [1,1]")

    def test_value_errors(self):
        with self.assertRaises(errors.ParseError):
            parse_fn("piecewise on [0,1] { (0,1): 1; 0: [1,0] }")
        with self.assertRaises(errors.ParseError):
            parse_fn("piecewise on [0,1] { (0,1): 1; 0: 1/0 }")

    def test_expression_errors(self):
        with self.assertRaises(errors.ZeroReciprocal):
            parse_fn("1/0 on [0,1]")
        with self.assertRaises(errors.NonRepresentablePoint):
            parse_fn("1/(x^2 - 2) on [0,2]")
        with self.assertRaises(errors.ParseError):
            parse_fn("x on [0,1] x")
        with self.assertRaises(errors.ParseError):
            parse_fn("x^1.5 on [0,1]")
        with self.assertRaises(errors.ParseError):
            parse_fn("piecewise on [0,1] { (0,1): 1")


class TestFormat(unittest.TestCase):

    def test_scalars(self):
        self.assertEqual(format_scalar(Rational(1, 3)), "1/3")
        self.assertEqual(format_scalar(Rational(1, 3), 3), "0.333~")
        self.assertEqual(format_scalar(Rational(2, 3), 2), "0.67~")
        self.assertEqual(format_scalar(Rational(1, 2), 3), "0.500")
        self.assertEqual(format_scalar(Rational(-5), 2), "-5.00")
        self.assertEqual(format_scalar(POS_INF, 2), "inf")
        self.assertEqual(format_scalar(NEG_INF), "-inf")

    def test_intervals(self):
        self.assertEqual(format_interval(XInterval(1, POS_INF)), "[1,inf]")
        self.assertEqual(format_interval(XInterval(Rational(1, 2))), "1/2")

    def test_sign(self):
        self.assertEqual(format_fn(parse_fn(SIGN)),
                         "piecewise on [-1,1] { -1: -1; (-1,0): -1; 0: [-1,1]; (0,1): 1; 1: 1 }")

    def test_reciprocal(self):
        self.assertEqual(format_fn(parse_fn("1/x on [-1,1]")),
                         "piecewise on [-1,1] { -1: -1; (-1,0): 1/x; 0: [-inf,inf]; (0,1): 1/x; 1: 1 }")

    def test_canonical_output(self):
        text = format_fn(parse_fn("piecewise on [-1,1] { (-1,0): x; (0,1): x }"))
        self.assertEqual(text, "piecewise on [-1,1] { -1: -1; (-1,1): x; 1: 1 }")

    @settings(max_examples=100, deadline=None)
    @given(functions())
    def test_format_parses_back(self, f):
        self.assertEqual(parse_fn(format_fn(f)), pw_canon(f))


if __name__ == '__main__':
    unittest.main()
