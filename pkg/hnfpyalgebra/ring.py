"""
Ring operations on H-continuous nearly finite functions: regularized addition and multiplication, linear
operations, inversion of non-zero-divisors, classification, and the constructive quotient, density witness and
homomorphism representation results.
"""
import logging
from typing import List, Tuple

from hnfpyalgebra import errors
from hnfpyalgebra.intervals import XInterval, add_iv, mul_iv, to_extreal
from hnfpyalgebra.piecewise import (PiecewiseFn, StructuralSets, check_same_domain, format_region, pw_canon,
                                    pw_constant, pw_equal, pw_extend_dense, pw_from_rational, pw_refine, pw_sets,
                                    pw_split, refine_all)
from hnfpyalgebra.rationals import (RationalFunc, X, rf_arith, rf_constant, rf_normalize, rf_poles, rf_roots,
                                    rf_sign_pattern)
from hnfpyalgebra.regularize import regularize

logger = logging.getLogger(__name__)


def require_h_continuous(*fs: PiecewiseFn):
    for f in fs:
        if not f.is_h_continuous:
            raise errors.NotHContinuous(f"Operand is not H-continuous: {f}")


def _pointwise(f: PiecewiseFn, g: PiecewiseFn, segment_op: str, value_op) -> PiecewiseFn:
    f, g = pw_refine(f, g)
    segments = []
    for (f_lo, f_hi), (g_lo, g_hi) in zip(f.segments, g.segments):
        segments.append((rf_arith(segment_op, f_lo, g_lo), rf_arith(segment_op, f_hi, g_hi)))
    values = [value_op(fv, gv) for fv, gv in zip(f.values, g.values)]
    return PiecewiseFn(f.breakpoints, values, segments)


def pointwise_add(f: PiecewiseFn, g: PiecewiseFn) -> PiecewiseFn:
    """
    Pointwise interval sum f(x) + g(x) before regularization.
    """
    return _pointwise(f, g, "add", add_iv)


def pointwise_mul(f: PiecewiseFn, g: PiecewiseFn) -> PiecewiseFn:
    """
    Pointwise interval product f(x) x g(x) before regularization.
    """
    return _pointwise(f, g, "mul", mul_iv)


def h_add(f: PiecewiseFn, g: PiecewiseFn) -> PiecewiseFn:
    """
    Ring addition: the unique H-continuous function contained in the pointwise sum.

    Parameters
    ----------
    f: PiecewiseFn
        H-continuous summand
    g: PiecewiseFn
        H-continuous summand on the same domain

    Returns
    -------
    PiecewiseFn
        Canonical H-continuous sum

    """
    check_same_domain(f, g)
    require_h_continuous(f, g)
    return regularize(pointwise_add(f, g))


def h_mul(f: PiecewiseFn, g: PiecewiseFn) -> PiecewiseFn:
    """
    Ring multiplication: the unique H-continuous function contained in the pointwise product, completed by one-sided
    limits at the points where an infinite value meets a zero.

    Parameters
    ----------
    f: PiecewiseFn
        H-continuous factor
    g: PiecewiseFn
        H-continuous factor on the same domain

    Returns
    -------
    PiecewiseFn
        Canonical H-continuous product

    """
    check_same_domain(f, g)
    require_h_continuous(f, g)
    return regularize(pointwise_mul(f, g))


def h_scale(c, f: PiecewiseFn) -> PiecewiseFn:
    c = to_extreal(c)
    require_h_continuous(f)
    factor = rf_constant(c)
    scalar = XInterval(c)
    segments = [(factor * lo, factor * hi) for lo, hi in f.segments]
    values = [mul_iv(scalar, v) for v in f.values]
    return regularize(PiecewiseFn(f.breakpoints, values, segments))


def h_linear(op: str, f: PiecewiseFn, g: PiecewiseFn = None, c=None) -> PiecewiseFn:
    """
    Linear operations derived from the ring operations.

    Parameters
    ----------
    op: str
        'neg', 'sub' (f - g) or 'scale' (c * f)
    f: PiecewiseFn
        First operand
    g: PiecewiseFn
        Subtrahend for 'sub'
    c:
        Rational factor for 'scale'

    Returns
    -------
    PiecewiseFn

    """
    if op == "neg":
        return h_scale(-1, f)
    elif op == "sub":
        check_same_domain(f, g)
        return h_add(f, h_scale(-1, g))
    elif op == "scale":
        return h_scale(c, f)
    else:
        raise ValueError(f"Unsupported linear operation '{op}'. Supported: 'neg', 'sub', 'scale'.")


def h_neg(f: PiecewiseFn) -> PiecewiseFn:
    return h_linear("neg", f)


def h_sub(f: PiecewiseFn, g: PiecewiseFn) -> PiecewiseFn:
    return h_linear("sub", f, g)


def is_zero_divisor(f: PiecewiseFn) -> bool:
    return pw_sets(f).zero_set_has_interior


def h_inv(f: PiecewiseFn) -> PiecewiseFn:
    """
    Multiplicative inverse of a non-zero-divisor: segment-wise reciprocals, with the rational roots of the segment
    functions inserted as new breakpoints and all breakpoint values completed by one-sided limits.

    Parameters
    ----------
    f: PiecewiseFn
        H-continuous function whose zero set has empty interior

    Returns
    -------
    PiecewiseFn
        Canonical inverse with h_mul(f, inverse) = 1

    """
    require_h_continuous(f)
    sets = pw_sets(f)
    if sets.zero_set_has_interior:
        raise errors.ZeroDivisor(f"Z(f) contains {format_region(sets.zero_intervals[0])}")
    points = set(f.breakpoints)
    for i, (lo, _) in enumerate(f.segments):
        left, right = f.segment_bounds(i)
        for root in rf_roots(lo, left, right):
            if not root.is_exact:
                raise errors.NonRepresentablePoint(f"{lo} has an irrational root in ({root.lo}, {root.hi})",
                                                   isolating_interval=(root.lo, root.hi), segment_index=i)
            points.add(root.value)
    split = pw_split(f, points)
    segments = []
    for lo, _ in split.segments:
        inverse = rf_arith("recip", lo)
        segments.append((inverse, inverse))
    partial = PiecewiseFn(split.breakpoints, [None] * len(split.breakpoints), segments)
    return pw_canon(pw_extend_dense(partial))


class ClassFlags:
    """
    Membership of an H-continuous function in the classes C(X), H_ft, H_nf, H_nd and H_sz, together with the
    polynomial whose zero set contains the defect set.
    """

    def __init__(self, continuous: bool, finite: bool, nearly_finite: bool, in_h_nd: bool, in_h_sz: bool,
                 witness: RationalFunc):
        self.__continuous = continuous
        self.__finite = finite
        self.__nearly_finite = nearly_finite
        self.__in_h_nd = in_h_nd
        self.__in_h_sz = in_h_sz
        self.__witness = witness

    @property
    def continuous(self) -> bool:
        return self.__continuous

    @property
    def finite(self) -> bool:
        return self.__finite

    @property
    def nearly_finite(self) -> bool:
        return self.__nearly_finite

    @property
    def in_h_nd(self) -> bool:
        return self.__in_h_nd

    @property
    def in_h_sz(self) -> bool:
        return self.__in_h_sz

    @property
    def witness(self) -> RationalFunc:
        return self.__witness

    def as_dict(self) -> dict:
        return {"continuous": self.__continuous, "finite": self.__finite, "nearly_finite": self.__nearly_finite,
                "in_H_nd": self.__in_h_nd, "in_H_sz": self.__in_h_sz, "witness": str(self.__witness)}


def _defect_points(sets: StructuralSets) -> list:
    return sorted(set(sets.w_points) | set(sets.gamma))


def _vanishing_polynomial(points) -> RationalFunc:
    product = rf_constant(1)
    for p in points:
        product = product * rf_normalize(X - p)
    return product


def classify(f: PiecewiseFn) -> ClassFlags:
    """
    Classifies an H-continuous function. Every representable function has finitely many breakpoints, so it is nearly
    finite and its defect set is contained in the zero set of a polynomial.
    """
    require_h_continuous(f)
    sets = pw_sets(f)
    defects = _defect_points(sets)
    witness = _vanishing_polynomial(defects)
    return ClassFlags(continuous=not defects, finite=f.is_finite, nearly_finite=f.is_nearly_finite, in_h_nd=True,
                      in_h_sz=True, witness=witness)


def as_quotient(f: PiecewiseFn) -> Tuple[PiecewiseFn, PiecewiseFn]:
    """
    Represents f as a quotient phi / psi of continuous functions with psi a non-zero-divisor.

    Parameters
    ----------
    f: PiecewiseFn
        H-continuous function

    Returns
    -------
    (PiecewiseFn, PiecewiseFn)
        phi = (f g) / (1 + f^2) and psi = g / (1 + f^2), where g vanishes on the defect set of f

    """
    require_h_continuous(f)
    defects = _defect_points(pw_sets(f))
    g = pw_from_rational(_vanishing_polynomial(defects), f.domain)
    one = pw_constant(1, f.domain)
    damping = h_inv(h_add(one, h_mul(f, f)))
    phi = h_mul(h_mul(f, g), damping)
    psi = h_mul(g, damping)
    logger.debug(f"Quotient representation uses a vanishing polynomial with {len(defects)} roots")
    return phi, psi


def is_zero_function(f: PiecewiseFn) -> bool:
    canonical = pw_canon(f)
    zero = XInterval(0)
    return all(lo.is_zero and hi.is_zero for lo, hi in canonical.segments) and all(
        v == zero for v in canonical.values)


def _hat(l, r, domain) -> PiecewiseFn:
    c = 4 / (r - l) ** 2
    bump = rf_normalize(c * (X - l) * (r - X))
    zero = rf_constant(0)
    points = [domain[0], l, r, domain[1]]
    segments = [(zero, zero), (bump, bump), (zero, zero)]
    return pw_extend_dense(PiecewiseFn(points, [None] * 4, segments))


def dense_witness(phi: PiecewiseFn, psi: PiecewiseFn) -> PiecewiseFn:
    """
    Continuous function f such that phi f is continuous and psi f is not zero.

    Parameters
    ----------
    phi: PiecewiseFn
        H-continuous function
    psi: PiecewiseFn
        H-continuous function, not identically zero

    Returns
    -------
    PiecewiseFn
        The constant 1 if phi is already continuous, otherwise a quadratic bump supported on an interval that avoids
        every breakpoint of phi and every zero of psi

    """
    require_h_continuous(phi, psi)
    check_same_domain(phi, psi)
    if is_zero_function(psi):
        raise errors.ZeroFunction("psi is the zero function")
    if classify(phi).continuous:
        return pw_constant(1, phi.domain)
    phi, psi = pw_refine(phi, psi)
    for i, (lo, _) in enumerate(psi.segments):
        if lo.is_zero:
            continue
        left, right = psi.segment_bounds(i)
        pattern = rf_sign_pattern(lo, left, right)
        for k, s in enumerate(pattern.signs):
            if s == 0:
                continue
            gap_left, gap_right = pattern.rational_gap(k)
            quarter = (gap_right - gap_left) / 4
            l, r = gap_left + quarter, gap_right - quarter
            logger.debug(f"Witness bump supported on ({l}, {r})")
            return _hat(l, r, phi.domain)
    raise errors.ZeroFunction("psi vanishes on every segment")


def rep_homomorphism(ps: List[PiecewiseFn], qs: List[PiecewiseFn]) -> PiecewiseFn:
    """
    Represents a module homomorphism from a finitely generated dense ideal into the ring, given by the images qs of
    the generators ps, as multiplication by a single function psi.

    Parameters
    ----------
    ps: list of PiecewiseFn
        Generators of the ideal
    qs: list of PiecewiseFn
        Images of the generators

    Returns
    -------
    PiecewiseFn
        H-continuous psi with h_mul(psi, p) = q for every generator pair

    """
    if not ps or len(ps) != len(qs):
        raise ValueError(f"Expected matching non-empty generator and image lists, got {len(ps)} and {len(qs)}")
    require_h_continuous(*ps, *qs)
    for i in range(len(ps)):
        for j in range(i + 1, len(ps)):
            if not pw_equal(h_mul(qs[i], ps[j]), h_mul(ps[i], qs[j])):
                raise errors.IncompatibleImages(f"Images of generators {i} and {j} are not compatible")
    refined = refine_all(list(ps) + list(qs))
    rps, rqs = refined[:len(ps)], refined[len(ps):]
    points = set(rps[0].breakpoints)
    chosen = []
    for k in range(len(rps[0].segments)):
        left, right = rps[0].segment_bounds(k)
        candidates = []
        for i, p in enumerate(rps):
            lo = p.segments[k][0]
            if not lo.is_zero:
                candidates.append((len(rf_roots(lo, left, right)), i))
        if not candidates:
            raise errors.IdealNotDense(f"Every generator vanishes on ({left}, {right})", segment_index=k)
        _, i = min(candidates)
        ratio = rqs[i].segments[k][0] / rps[i].segments[k][0]
        for pole in rf_poles(ratio, left, right):
            if not pole.is_exact:
                raise errors.NonRepresentablePoint(f"{ratio} has an irrational pole in ({pole.lo}, {pole.hi})",
                                                   isolating_interval=(pole.lo, pole.hi), segment_index=k)
            points.add(pole.value)
        chosen.append(ratio)
    base = PiecewiseFn(rps[0].breakpoints, [None] * len(rps[0].breakpoints), [(r, r) for r in chosen])
    psi = pw_canon(pw_extend_dense(pw_split(base, points)))
    for i, (p, q) in enumerate(zip(ps, qs)):
        if not pw_equal(h_mul(psi, p), q):
            raise errors.IncompatibleImages(f"Image of generator {i} is not a multiple of the generator")
    return psi
