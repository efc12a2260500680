import unittest

from hypothesis import given, settings, strategies as st
from sympy import Rational

from hnfpyalgebra import errors
from hnfpyalgebra.intervals import XInterval, add_iv, mul_iv, NEG_INF, POS_INF
from hnfpyalgebra.piecewise import (PiecewiseFn, pw_build, pw_constant, pw_equal, pw_eval, pw_from_rational,
                                    pw_restrict, pw_subset)
from hnfpyalgebra.rationals import X, rf_identity, rf_normalize
from hnfpyalgebra.ring import (as_quotient, classify, dense_witness, h_add, h_inv, h_linear, h_mul, h_neg, h_scale,
                               h_sub, is_zero_divisor, is_zero_function, pointwise_add, pointwise_mul, rep_homomorphism)
from test.strategies import finite_functions, functions, points, polynomials, subdomains, zero_divisor_pairs

DOMAIN = (-1, 1)


def sign_fn():
    return pw_build(DOMAIN, [-1, 0, 1], [-1, (-1, 1), 1], [-1, 1])


def abs_fn():
    return pw_build(DOMAIN, [-1, 0, 1], [1, 0, 1], [-X, X])


def pluspart_fn():
    return pw_build(DOMAIN, [-1, 0, 1], [0, 0, 1], [0, X])


def x_fn():
    return pw_from_rational(rf_identity(), DOMAIN)


def one_fn():
    return pw_constant(1, DOMAIN)


def zero_fn():
    return pw_constant(0, DOMAIN)


class TestRingOperations(unittest.TestCase):

    def test_sign_squared_is_one(self):
        self.assertTrue(pw_equal(h_mul(sign_fn(), sign_fn()), one_fn()))

    def test_sum_with_negative_is_zero(self):
        self.assertTrue(pw_equal(h_add(sign_fn(), h_neg(sign_fn())), zero_fn()))
        self.assertTrue(pw_equal(h_sub(abs_fn(), abs_fn()), zero_fn()))

    def test_infinite_values_are_regularized(self):
        reciprocal = pw_from_rational(rf_normalize(1, X), DOMAIN)
        self.assertTrue(pw_equal(h_mul(x_fn(), reciprocal), one_fn()))
        total = h_add(reciprocal, h_neg(reciprocal))
        self.assertTrue(pw_equal(total, zero_fn()))

    def test_scale(self):
        self.assertTrue(pw_equal(h_scale(2, x_fn()), pw_from_rational(rf_normalize(2 * X), DOMAIN)))
        self.assertTrue(pw_equal(h_scale(0, sign_fn()), zero_fn()))
        self.assertTrue(pw_equal(h_linear("scale", x_fn(), c=Rational(1, 2)),
                                 pw_from_rational(rf_normalize(X, 2), DOMAIN)))
        with self.assertRaises(ValueError):
            h_linear("div", x_fn(), x_fn())

    def test_operands_must_be_h_continuous(self):
        loose = PiecewiseFn([-1, 0, 1], [-1, (-2, 2), 1], [(-1, -1), (1, 1)])
        with self.assertRaises(errors.NotHContinuous):
            h_add(loose, sign_fn())
        with self.assertRaises(errors.DomainMismatch):
            h_mul(sign_fn(), pw_constant(1, (0, 1)))

    def test_product_is_inside_pointwise_product(self):
        self.assertTrue(pw_subset(h_mul(sign_fn(), abs_fn()), pointwise_mul(sign_fn(), abs_fn())))

    @settings(max_examples=100, deadline=None)
    @given(functions(), functions())
    def test_commutative(self, f, g):
        self.assertTrue(pw_equal(h_add(f, g), h_add(g, f)))
        self.assertTrue(pw_equal(h_mul(f, g), h_mul(g, f)))

    @settings(max_examples=100, deadline=None)
    @given(functions(), functions(), functions())
    def test_associative(self, f, g, h):
        self.assertTrue(pw_equal(h_add(h_add(f, g), h), h_add(f, h_add(g, h))))
        self.assertTrue(pw_equal(h_mul(h_mul(f, g), h), h_mul(f, h_mul(g, h))))

    @settings(max_examples=100, deadline=None)
    @given(functions(), functions(), functions())
    def test_distributive(self, f, g, h):
        self.assertTrue(pw_equal(h_mul(f, h_add(g, h)), h_add(h_mul(f, g), h_mul(f, h))))

    @settings(max_examples=40, deadline=None)
    @given(functions())
    def test_identities(self, f):
        self.assertTrue(pw_equal(h_add(f, zero_fn()), f))
        self.assertTrue(pw_equal(h_mul(f, one_fn()), f))
        self.assertTrue(is_zero_function(h_add(f, h_neg(f))))

    @settings(max_examples=40, deadline=None)
    @given(finite_functions(), finite_functions())
    def test_inclusion_in_pointwise_product(self, f, g):
        self.assertTrue(pw_subset(h_mul(f, g), pointwise_mul(f, g)))

    @settings(max_examples=40, deadline=None)
    @given(functions(), functions(), subdomains())
    def test_restriction_commutes_with_operations(self, f, g, subdomain):
        lo, hi = subdomain
        restricted = h_mul(pw_restrict(f, lo, hi), pw_restrict(g, lo, hi))
        self.assertTrue(pw_equal(pw_restrict(h_mul(f, g), lo, hi), restricted))
        restricted = h_add(pw_restrict(f, lo, hi), pw_restrict(g, lo, hi))
        self.assertTrue(pw_equal(pw_restrict(h_add(f, g), lo, hi), restricted))

    @settings(max_examples=50, deadline=None)
    @given(polynomials(), functions())
    def test_sum_with_continuous_function_is_pointwise(self, f, g):
        total, pointwise = h_add(f, g), pointwise_add(f, g)
        for p in g.breakpoints:
            self.assertEqual(pw_eval(total, p), pw_eval(pointwise, p))

    @settings(max_examples=50, deadline=None)
    @given(functions(), functions(), st.lists(points(), min_size=1, max_size=5))
    def test_pointwise_off_breakpoints(self, f, g, xs):
        total, product = h_add(f, g), h_mul(f, g)
        for x in xs:
            fx, gx = pw_eval(f, x), pw_eval(g, x)
            self.assertEqual(pw_eval(total, x), add_iv(fx, gx))
            self.assertEqual(pw_eval(product, x), mul_iv(fx, gx))

    @settings(max_examples=50, deadline=None)
    @given(zero_divisor_pairs())
    def test_zero_divisor_pairs(self, pair):
        f, g = pair
        self.assertTrue(is_zero_divisor(f))
        self.assertTrue(is_zero_divisor(g))
        self.assertTrue(is_zero_function(h_mul(f, g)))
        self.assertTrue(is_zero_function(h_mul(g, f)))


class TestInverse(unittest.TestCase):

    def test_inverse_of_identity(self):
        inverse = h_inv(x_fn())
        self.assertTrue(pw_equal(inverse, pw_from_rational(rf_normalize(1, X), DOMAIN)))
        self.assertEqual(pw_eval(inverse, 0), XInterval(NEG_INF, POS_INF))

    def test_sign_is_self_inverse(self):
        self.assertTrue(pw_equal(h_inv(sign_fn()), sign_fn()))

    def test_zero_divisor(self):
        self.assertTrue(is_zero_divisor(pluspart_fn()))
        self.assertFalse(is_zero_divisor(x_fn()))
        with self.assertRaises(errors.ZeroDivisor) as ctx:
            h_inv(pluspart_fn())
        self.assertEqual(str(ctx.exception), "Z(f) contains (-1,0)")

    def test_irrational_root(self):
        f = pw_from_rational(rf_normalize(X ** 2 - Rational(1, 2)), DOMAIN)
        with self.assertRaises(errors.NonRepresentablePoint):
            h_inv(f)

    @settings(max_examples=40, deadline=None)
    @given(functions())
    def test_inverse_times_function_is_one(self, f):
        if is_zero_divisor(f):
            with self.assertRaises(errors.ZeroDivisor):
                h_inv(f)
            return
        try:
            inverse = h_inv(f)
        except errors.NonRepresentablePoint:
            return
        self.assertTrue(pw_equal(h_mul(f, inverse), one_fn()))

    @settings(max_examples=50, deadline=None)
    @given(functions())
    def test_inverse_is_involution(self, f):
        if is_zero_divisor(f):
            return
        try:
            twice = h_inv(h_inv(f))
        except errors.NonRepresentablePoint:
            return
        self.assertTrue(pw_equal(twice, f))

    def test_reciprocal_involution(self):
        reciprocal = pw_from_rational(rf_normalize(1, X), DOMAIN)
        self.assertTrue(pw_equal(h_inv(h_inv(reciprocal)), reciprocal))
        self.assertTrue(pw_equal(h_inv(h_inv(sign_fn())), sign_fn()))


class TestClassification(unittest.TestCase):

    def test_sign(self):
        flags = classify(sign_fn())
        self.assertFalse(flags.continuous)
        self.assertTrue(flags.finite)
        self.assertTrue(flags.nearly_finite)
        self.assertTrue(flags.in_h_nd)
        self.assertTrue(flags.in_h_sz)
        self.assertEqual(str(flags.witness), "x")

    def test_continuous(self):
        flags = classify(x_fn())
        self.assertTrue(flags.continuous)
        self.assertEqual(str(flags.witness), "1")

    def test_pole(self):
        flags = classify(pw_from_rational(rf_normalize(1, X ** 2), DOMAIN))
        self.assertFalse(flags.continuous)
        self.assertFalse(flags.finite)
        self.assertTrue(flags.nearly_finite)
        self.assertEqual(flags.as_dict()["witness"], "x")
        self.assertEqual(set(flags.as_dict()), {"continuous", "finite", "nearly_finite", "in_H_nd", "in_H_sz",
                                                "witness"})


class TestQuotients(unittest.TestCase):

    def test_sign_as_quotient(self):
        phi, psi = as_quotient(sign_fn())
        self.assertTrue(pw_equal(phi, h_scale(Rational(1, 2), abs_fn())))
        self.assertTrue(pw_equal(psi, pw_from_rational(rf_normalize(X, 2), DOMAIN)))
        self.assertTrue(pw_equal(h_mul(sign_fn(), psi), phi))
        self.assertFalse(is_zero_divisor(psi))

    def test_reciprocal_as_quotient(self):
        reciprocal = pw_from_rational(rf_normalize(1, X), DOMAIN)
        phi, psi = as_quotient(reciprocal)
        self.assertTrue(pw_equal(phi, pw_from_rational(rf_normalize(X ** 2, X ** 2 + 1), DOMAIN)))
        self.assertTrue(pw_equal(psi, pw_from_rational(rf_normalize(X ** 3, X ** 2 + 1), DOMAIN)))
        self.assertTrue(pw_equal(h_mul(reciprocal, psi), phi))
        self.assertEqual(pw_eval(phi, 0), XInterval(0))

    @settings(max_examples=25, deadline=None)
    @given(functions())
    def test_quotient_parts_are_continuous(self, f):
        phi, psi = as_quotient(f)
        self.assertTrue(classify(phi).continuous)
        self.assertTrue(classify(psi).continuous)
        self.assertFalse(is_zero_divisor(psi))
        self.assertTrue(pw_equal(h_mul(f, psi), phi))

    def test_dense_witness(self):
        w = dense_witness(sign_fn(), x_fn())
        self.assertTrue(classify(w).continuous)
        self.assertTrue(classify(h_mul(sign_fn(), w)).continuous)
        self.assertFalse(is_zero_function(h_mul(x_fn(), w)))

    def test_dense_witness_of_continuous_function(self):
        self.assertTrue(pw_equal(dense_witness(x_fn(), sign_fn()), one_fn()))

    def test_dense_witness_needs_nonzero_psi(self):
        with self.assertRaises(errors.ZeroFunction):
            dense_witness(sign_fn(), zero_fn())


class TestHomomorphisms(unittest.TestCase):

    def test_single_generator(self):
        self.assertTrue(pw_equal(rep_homomorphism([x_fn()], [abs_fn()]), sign_fn()))

    def test_generator_order_does_not_matter(self):
        square = pw_from_rational(rf_normalize(X ** 2), DOMAIN)
        x_abs = pw_build(DOMAIN, [-1, 0, 1], [-1, 0, 1], [-X ** 2, X ** 2])
        forward = rep_homomorphism([x_fn(), square], [abs_fn(), x_abs])
        backward = rep_homomorphism([square, x_fn()], [x_abs, abs_fn()])
        self.assertTrue(pw_equal(forward, sign_fn()))
        self.assertTrue(pw_equal(backward, sign_fn()))

    def test_incompatible_images(self):
        with self.assertRaises(errors.IncompatibleImages):
            rep_homomorphism([x_fn(), x_fn()], [x_fn(), h_scale(2, x_fn())])

    def test_ideal_not_dense(self):
        with self.assertRaises(errors.IdealNotDense):
            rep_homomorphism([pluspart_fn()], [pluspart_fn()])

    def test_mismatched_lists(self):
        with self.assertRaises(ValueError):
            rep_homomorphism([x_fn()], [])


if __name__ == '__main__':
    unittest.main()
