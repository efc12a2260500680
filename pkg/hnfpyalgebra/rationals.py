"""
Exact single-variable rational functions: canonical form, field arithmetic, one-sided limits, real root isolation
and certified suprema. This is the per-segment expression engine of the piecewise model.

Polynomials are sympy ``Poly`` objects over ZZ in the generator ``X``. Root isolation factors the numerator over the
rationals, reports rational roots exactly and isolates the roots of the remaining irreducible factors by Sturm
sequence sign-change counting and exact bisection. No floating point enters a decision.
"""
import enum
import logging
from fractions import Fraction
from typing import List

import sympy
from sympy import Poly, Rational, ZZ, QQ

from hnfpyalgebra import errors
from hnfpyalgebra.intervals import XInterval, POS_INF, NEG_INF, add_iv, mul_iv, is_infinite, to_extreal

logger = logging.getLogger(__name__)

X = sympy.Symbol("x")

DEFAULT_TOLERANCE = Rational(1, 10 ** 12)


def _zz_poly(value) -> Poly:
    if isinstance(value, Poly) and value.domain == ZZ and value.gens == (X,):
        return value
    if isinstance(value, Poly):
        value = value.as_expr()
    return Poly(value, X, domain=QQ)


def _to_fraction(value) -> Fraction:
    value = to_extreal(value)
    return Fraction(int(value.p), int(value.q))


def _horner(coeffs: tuple, point: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * point + c
    return acc


def _derivative_coeffs(coeffs: tuple) -> tuple:
    degree = len(coeffs) - 1
    return tuple(c * (degree - i) for i, c in enumerate(coeffs[:-1])) or (0,)


def _sign(value) -> int:
    if value > 0:
        return 1
    if value < 0:
        return -1
    return 0


class RationalFunc:
    """
    Exact quotient of two integer-coefficient polynomials in canonical form: coprime, content-free as a pair and with
    a positive leading denominator coefficient. Instances are immutable and hashable; two instances are equal iff they
    represent the same element of the rational function field.
    """

    def __init__(self, num: Poly, den: Poly):
        """
        Wraps an already canonical pair. Use rf_normalize to build from arbitrary polynomials.

        Parameters
        ----------
        num: sympy.Poly
            Numerator over ZZ in X
        den: sympy.Poly
            Denominator over ZZ in X
        """
        self.__num = num
        self.__den = den
        self.__num_coeffs = tuple(int(c) for c in num.all_coeffs())
        self.__den_coeffs = tuple(int(c) for c in den.all_coeffs())
        self.__hash = hash((self.__num_coeffs, self.__den_coeffs))

    @property
    def num(self) -> Poly:
        return self.__num

    @property
    def den(self) -> Poly:
        return self.__den

    @property
    def num_coeffs(self) -> tuple:
        return self.__num_coeffs

    @property
    def den_coeffs(self) -> tuple:
        return self.__den_coeffs

    @property
    def is_zero(self) -> bool:
        return self.__num.is_zero

    @property
    def is_constant(self) -> bool:
        return self.__num.degree() <= 0 and self.__den.degree() == 0

    @property
    def is_polynomial(self) -> bool:
        return self.__den.degree() == 0

    def constant_value(self):
        if not self.is_constant:
            raise ValueError(f"{self} is not constant")
        return Rational(self.__num_coeffs[-1], self.__den_coeffs[-1])

    def den_vanishes_at(self, point) -> bool:
        return _horner(self.__den_coeffs, _to_fraction(point)) == 0

    def __call__(self, point):
        return rf_eval(self, point)

    def __add__(self, other):
        return rf_arith("add", self, as_rational_func(other))

    def __radd__(self, other):
        return rf_arith("add", as_rational_func(other), self)

    def __sub__(self, other):
        return rf_arith("add", self, rf_arith("neg", as_rational_func(other)))

    def __rsub__(self, other):
        return rf_arith("add", as_rational_func(other), rf_arith("neg", self))

    def __mul__(self, other):
        return rf_arith("mul", self, as_rational_func(other))

    def __rmul__(self, other):
        return rf_arith("mul", as_rational_func(other), self)

    def __truediv__(self, other):
        return rf_arith("mul", self, rf_arith("recip", as_rational_func(other)))

    def __neg__(self):
        return rf_arith("neg", self)

    def __eq__(self, other):
        if not isinstance(other, RationalFunc):
            return NotImplemented
        return self.__num_coeffs == other.num_coeffs and self.__den_coeffs == other.den_coeffs

    def __hash__(self):
        return self.__hash

    def __str__(self):
        return format_rational_func(self)

    def __repr__(self):
        return f"RationalFunc({format_rational_func(self)})"


def _canonical_pair(num: Poly, den: Poly) -> RationalFunc:
    if den.is_zero:
        raise errors.ZeroDenominator("Denominator is identically zero")
    if num.is_zero:
        return RationalFunc(Poly(0, X, domain=ZZ), Poly(1, X, domain=ZZ))
    g = num.gcd(den)
    num = num.exquo(g)
    den = den.exquo(g)
    if den.LC() < 0:
        num, den = -num, -den
    return RationalFunc(num, den)


def rf_normalize(num, den=1) -> RationalFunc:
    """
    Brings a quotient of polynomials into canonical coprime form.

    Parameters
    ----------
    num:
        Numerator: sympy Poly, sympy expression in X, or an exact scalar
    den:
        Denominator, same accepted types

    Returns
    -------
    RationalFunc
        Canonical form that agrees with num/den wherever den does not vanish

    """
    num_q = _zz_poly(num)
    den_q = _zz_poly(den)
    if den_q.is_zero:
        raise errors.ZeroDenominator(f"Denominator of ({num_q.as_expr()})/({den_q.as_expr()}) is identically zero")
    if num_q.domain != ZZ:
        cn, num_q = num_q.clear_denoms(convert=True)
    else:
        cn = 1
    if den_q.domain != ZZ:
        cd, den_q = den_q.clear_denoms(convert=True)
    else:
        cd = 1
    # num/den = (num_q / cn) / (den_q / cd)
    num_z = num_q * int(cd)
    den_z = den_q * int(cn)
    return _canonical_pair(num_z, den_z)


def as_rational_func(value) -> RationalFunc:
    if isinstance(value, RationalFunc):
        return value
    if isinstance(value, (Poly, sympy.Expr)) and not isinstance(value, Rational):
        return rf_normalize(value)
    value = to_extreal(value)
    if is_infinite(value):
        raise ValueError("A rational function cannot be constantly infinite")
    return rf_normalize(Poly(value.p, X, domain=ZZ), Poly(value.q, X, domain=ZZ))


def rf_constant(value) -> RationalFunc:
    return as_rational_func(value)


def rf_identity() -> RationalFunc:
    return rf_normalize(X)


def rf_arith(op: str, f: RationalFunc, g: RationalFunc = None) -> RationalFunc:
    """
    Exact field operations in the rational function field.

    Parameters
    ----------
    op: str
        One of 'add', 'mul', 'neg', 'recip'
    f: RationalFunc
        First operand
    g: RationalFunc
        Second operand for the binary operations

    Returns
    -------
    RationalFunc
        Canonical result

    """
    if op == "add":
        if f.is_zero:
            return g
        if g.is_zero:
            return f
        return _canonical_pair(f.num * g.den + g.num * f.den, f.den * g.den)
    elif op == "mul":
        if f.is_zero or g.is_zero:
            return _canonical_pair(Poly(0, X, domain=ZZ), Poly(1, X, domain=ZZ))
        return _canonical_pair(f.num * g.num, f.den * g.den)
    elif op == "neg":
        return RationalFunc(-f.num, f.den)
    elif op == "recip":
        if f.is_zero:
            raise errors.ZeroReciprocal("Reciprocal of the zero function")
        return _canonical_pair(f.den, f.num)
    else:
        raise ValueError(f"Unsupported rational function operation '{op}'. Supported: 'add', 'mul', 'neg', 'recip'.")


def rf_derivative(f: RationalFunc) -> RationalFunc:
    num = f.num.diff(X) * f.den - f.num * f.den.diff(X)
    return _canonical_pair(num, f.den ** 2)


def rf_eval(f: RationalFunc, point):
    """
    Exact value of f at a rational point where its denominator does not vanish.
    """
    p = _to_fraction(point)
    d = _horner(f.den_coeffs, p)
    if d == 0:
        raise errors.ZeroDenominator(f"{f} has a pole at {point}")
    v = _horner(f.num_coeffs, p) / d
    return Rational(v.numerator, v.denominator)


def rf_limit(f: RationalFunc, point, side: str = "both"):
    """
    Exact one-sided limit of f at a rational point.

    Parameters
    ----------
    f: RationalFunc
        Function
    point:
        Rational point
    side: str
        'left', 'right' or 'both'

    Returns
    -------
    sympy.Expr
        Rational value, oo or -oo

    """
    if side not in ("left", "right", "both"):
        raise ValueError(f"Unsupported side '{side}'. Supported: 'left', 'right', 'both'.")
    p = _to_fraction(point)
    if _horner(f.den_coeffs, p) != 0:
        return rf_eval(f, point)
    # den = (x - p)^m q(x) with q(p) != 0; the sign of q(p) is the sign of the m-th derivative at p
    coeffs = f.den_coeffs
    multiplicity = 0
    value = 0
    while value == 0:
        coeffs = _derivative_coeffs(coeffs)
        multiplicity += 1
        value = _horner(coeffs, p)
    num_sign = _sign(_horner(f.num_coeffs, p))
    right = num_sign * _sign(value)
    left = right * (-1) ** multiplicity
    as_inf = {1: POS_INF, -1: NEG_INF}
    if side == "right":
        return as_inf[right]
    if side == "left":
        return as_inf[left]
    if left != right:
        raise errors.LimitsDisagree(f"One-sided limits of {f} at {point} differ")
    return as_inf[right]


class IsolatedRoot:
    """
    A real root given exactly (lo == hi) or by a rational isolating interval (lo, hi) that contains exactly one root
    of the irreducible factor it belongs to and no other reported root.
    """

    def __init__(self, lo, hi, multiplicity: int, factor: Poly):
        """

        Parameters
        ----------
        lo:
            Left end of the isolating interval, or the root itself
        hi:
            Right end of the isolating interval, or the root itself
        multiplicity: int
            Multiplicity of the root in the analysed numerator
        factor: sympy.Poly
            Irreducible factor over ZZ that vanishes at the root
        """
        self.__lo = to_extreal(lo)
        self.__hi = to_extreal(hi)
        self.__multiplicity = multiplicity
        self.__factor = factor

    @property
    def lo(self):
        return self.__lo

    @property
    def hi(self):
        return self.__hi

    @property
    def multiplicity(self) -> int:
        return self.__multiplicity

    @property
    def factor(self) -> Poly:
        return self.__factor

    @property
    def is_exact(self) -> bool:
        return self.__lo == self.__hi

    @property
    def value(self):
        if not self.is_exact:
            raise ValueError("Root is irrational; only an isolating interval is known")
        return self.__lo

    def bisect(self) -> "IsolatedRoot":
        if self.is_exact:
            return self
        coeffs = tuple(int(c) for c in self.__factor.all_coeffs())
        mid = (self.__lo + self.__hi) / 2
        left_sign = _sign(_horner(coeffs, _to_fraction(self.__lo)))
        mid_sign = _sign(_horner(coeffs, _to_fraction(mid)))
        if left_sign * mid_sign < 0:
            return IsolatedRoot(self.__lo, mid, self.__multiplicity, self.__factor)
        return IsolatedRoot(mid, self.__hi, self.__multiplicity, self.__factor)

    def overlaps(self, other: "IsolatedRoot") -> bool:
        return self.__lo <= other.hi and other.lo <= self.__hi

    def __repr__(self):
        if self.is_exact:
            return f"IsolatedRoot({self.__lo}, multiplicity={self.__multiplicity})"
        return f"IsolatedRoot(({self.__lo}, {self.__hi}), multiplicity={self.__multiplicity})"


def _sign_variations(sequence: List[tuple], point: Fraction) -> int:
    signs = [s for s in (_sign(_horner(c, point)) for c in sequence) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _isolate_irreducible(factor: Poly, lo, hi, multiplicity: int) -> List[IsolatedRoot]:
    sturm = factor.sturm()
    sequence = []
    for p in sturm:
        _, pz = p.clear_denoms(convert=True)
        sequence.append(tuple(int(c) for c in pz.all_coeffs()))
    roots = []
    stack = [(lo, hi)]
    while stack:
        a, b = stack.pop()
        count = _sign_variations(sequence, _to_fraction(a)) - _sign_variations(sequence, _to_fraction(b))
        if count == 0:
            continue
        if count == 1:
            roots.append(IsolatedRoot(a, b, multiplicity, factor))
            continue
        mid = (a + b) / 2
        stack.append((mid, b))
        stack.append((a, mid))
    return roots


def isolate_poly_roots(poly: Poly, lo, hi) -> List[IsolatedRoot]:
    """
    Real roots of an integer polynomial strictly inside the open interval (lo, hi), sorted, with mutually disjoint
    isolating intervals that lie strictly inside (lo, hi).

    Parameters
    ----------
    poly: sympy.Poly
        Polynomial over ZZ or QQ in X
    lo:
        Rational left bound
    hi:
        Rational right bound

    Returns
    -------
    List of IsolatedRoot

    """
    lo, hi = to_extreal(lo), to_extreal(hi)
    poly = _zz_poly(poly)
    if poly.is_zero:
        raise errors.IdenticallyZero("Cannot isolate the roots of the zero polynomial")
    if poly.degree() <= 0:
        return []
    _, factors = poly.factor_list()
    exact = []
    irrational = []
    for factor, multiplicity in factors:
        if factor.degree() == 1:
            a, b = factor.all_coeffs()
            root = Rational(-b, a)
            if lo < root < hi:
                exact.append(IsolatedRoot(root, root, multiplicity, factor))
        else:
            irrational.extend(_isolate_irreducible(factor, lo, hi, multiplicity))
    changed = True
    while changed:
        changed = False
        for i, root in enumerate(irrational):
            clashes = root.lo == lo or root.hi == hi
            clashes = clashes or any(root.overlaps(other) for other in exact)
            clashes = clashes or any(root.overlaps(other) for j, other in enumerate(irrational) if j != i)
            if clashes:
                irrational[i] = root.bisect()
                changed = True
    roots = sorted(exact + irrational, key=lambda r: r.lo)
    logger.debug(f"Isolated {len(exact)} rational and {len(irrational)} irrational roots in ({lo}, {hi})")
    return roots


def rf_roots(f: RationalFunc, lo, hi) -> List[IsolatedRoot]:
    """
    Numerator roots of f inside the open interval (lo, hi): rational roots exactly, irrational roots by isolating
    rational intervals.

    Parameters
    ----------
    f: RationalFunc
        Function that is not identically zero
    lo:
        Rational left bound
    hi:
        Rational right bound

    Returns
    -------
    List of IsolatedRoot

    """
    if f.is_zero:
        raise errors.IdenticallyZero("The zero function has no isolated roots")
    return isolate_poly_roots(f.num, lo, hi)


def rf_poles(f: RationalFunc, lo, hi) -> List[IsolatedRoot]:
    return isolate_poly_roots(f.den, lo, hi)


class SignPattern:
    """
    Certified signs of a pole-free rational function on an open interval: the numerator roots and, for each of the
    len(roots) + 1 gaps around them, a rational test point together with the constant sign on that gap.
    """

    def __init__(self, lo, hi, roots: List[IsolatedRoot], test_points: list, signs: List[int]):
        self.__lo = lo
        self.__hi = hi
        self.__roots = roots
        self.__test_points = test_points
        self.__signs = signs

    @property
    def lo(self):
        return self.__lo

    @property
    def hi(self):
        return self.__hi

    @property
    def roots(self) -> List[IsolatedRoot]:
        return self.__roots

    @property
    def test_points(self) -> list:
        return self.__test_points

    @property
    def signs(self) -> List[int]:
        return self.__signs

    def gap_bounds(self, i: int) -> tuple:
        left = self.__lo if i == 0 else self.__roots[i - 1]
        right = self.__hi if i == len(self.__roots) else self.__roots[i]
        return left, right

    def rational_gap(self, i: int) -> tuple:
        """
        Rational ends of gap i: the isolating intervals of the adjacent roots are excluded.
        """
        left = self.__lo if i == 0 else self.__roots[i - 1].hi
        right = self.__hi if i == len(self.__roots) else self.__roots[i].lo
        return left, right


def rf_sign_pattern(f: RationalFunc, lo, hi, check_poles: bool = True) -> SignPattern:
    """
    Certified sign analysis of f on the open interval (lo, hi). The zero function yields no roots and a single gap of
    sign 0.

    Parameters
    ----------
    f: RationalFunc
        Function without poles inside (lo, hi)
    lo:
        Rational left bound
    hi:
        Rational right bound
    check_poles: bool
        Whether to verify that f has no pole inside (lo, hi)

    Returns
    -------
    SignPattern

    """
    lo, hi = to_extreal(lo), to_extreal(hi)
    if f.is_zero:
        return SignPattern(lo, hi, [], [(lo + hi) / 2], [0])
    if check_poles and rf_poles(f, lo, hi):
        raise errors.InteriorPole(f"{f} has a pole inside ({lo}, {hi})")
    roots = rf_roots(f, lo, hi)
    bounds = [lo] + [b for r in roots for b in (r.lo, r.hi)] + [hi]
    test_points = [(bounds[2 * i] + bounds[2 * i + 1]) / 2 for i in range(len(roots) + 1)]
    signs = [_sign(rf_eval(f, t)) for t in test_points]
    return SignPattern(lo, hi, roots, test_points, signs)


def rf_nonnegative(f: RationalFunc, lo, hi) -> bool:
    """
    Certifies f >= 0 on the open interval (lo, hi).
    """
    return all(s >= 0 for s in rf_sign_pattern(f, lo, hi).signs)


def rf_positive_on_closure(f: RationalFunc, lo, hi) -> bool:
    """
    Certifies f > 0 on (lo, hi) and that both one-sided limits at the ends are positive, so that f is bounded away
    from zero on the closed segment.
    """
    if f.is_zero:
        return False
    pattern = rf_sign_pattern(f, lo, hi)
    if pattern.roots or any(s <= 0 for s in pattern.signs):
        return False
    return rf_limit(f, lo, "right") > 0 and rf_limit(f, hi, "left") > 0


def rf_interval_eval(f: RationalFunc, lo, hi):
    """
    Encloses the range of f over the closed interval [lo, hi] by interval Horner evaluation of numerator and
    denominator.

    Returns
    -------
    XInterval or None
        Enclosure of f, or None if the denominator enclosure contains zero

    """
    box = XInterval(lo, hi)

    def horner(coeffs):
        acc = XInterval(coeffs[0])
        for c in coeffs[1:]:
            acc = add_iv(mul_iv(acc, box), XInterval(c))
        return acc

    num = horner(f.num_coeffs)
    den = horner(f.den_coeffs)
    if den.contains(0):
        return None
    return mul_iv(num, XInterval(1 / den.hi, 1 / den.lo))


class Verdict(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNDECIDABLE = "undecidable"

    @classmethod
    def of(cls, value: bool) -> "Verdict":
        return cls.TRUE if value else cls.FALSE


class Enclosure:
    """
    Certified bounds lo <= value <= hi on a real quantity. If both bounds are finite then hi - lo <= tolerance; an
    infinite value is reported exactly as lo = hi = oo.
    """

    def __init__(self, lo, hi, tolerance):
        """

        Parameters
        ----------
        lo:
            Certified lower bound
        hi:
            Certified upper bound
        tolerance:
            Positive rational bound on hi - lo
        """
        self.__lo = to_extreal(lo)
        self.__hi = to_extreal(hi)
        self.__tolerance = to_extreal(tolerance)
        if self.__lo > self.__hi:
            raise ValueError(f"Enclosure bounds out of order: [{self.__lo}, {self.__hi}]")

    @property
    def lo(self):
        return self.__lo

    @property
    def hi(self):
        return self.__hi

    @property
    def tolerance(self):
        return self.__tolerance

    @property
    def is_exact(self) -> bool:
        return self.__lo == self.__hi

    @property
    def width(self):
        if self.is_exact:
            return Rational(0)
        return self.__hi - self.__lo

    def below(self, threshold) -> Verdict:
        """
        Decides value < threshold.
        """
        threshold = to_extreal(threshold)
        if self.__hi < threshold:
            return Verdict.TRUE
        if self.__lo >= threshold:
            return Verdict.FALSE
        return Verdict.UNDECIDABLE

    def at_most(self, threshold) -> Verdict:
        """
        Decides value <= threshold.
        """
        threshold = to_extreal(threshold)
        if self.__hi <= threshold:
            return Verdict.TRUE
        if self.__lo > threshold:
            return Verdict.FALSE
        return Verdict.UNDECIDABLE

    def __eq__(self, other):
        if not isinstance(other, Enclosure):
            return NotImplemented
        return self.__lo == other.lo and self.__hi == other.hi and self.__tolerance == other.tolerance

    def __hash__(self):
        return hash((self.__lo, self.__hi, self.__tolerance))

    def __repr__(self):
        return f"Enclosure([{self.__lo}, {self.__hi}], tol={self.__tolerance})"


def _abs_enclosure_upper(f: RationalFunc, root: IsolatedRoot):
    while True:
        enclosure = rf_interval_eval(f, root.lo, root.hi)
        if enclosure is not None:
            return max(abs(enclosure.lo), abs(enclosure.hi)), root
        root = root.bisect()


def rf_sup_abs(f: RationalFunc, lo, hi, tol=DEFAULT_TOLERANCE) -> Enclosure:
    """
    Certified enclosure of the supremum of |f| over the open interval (lo, hi), computed from the one-sided limits at
    the ends and |f| at the critical points. Irrational critical points are bracketed and bisected until the
    enclosure is at most tol wide.

    Parameters
    ----------
    f: RationalFunc
        Function without poles strictly inside (lo, hi)
    lo:
        Rational left bound
    hi:
        Rational right bound
    tol:
        Positive rational tolerance

    Returns
    -------
    Enclosure
        Enclosure of the supremum; exactly [oo, oo] if f is unbounded near an end

    """
    lo, hi, tol = to_extreal(lo), to_extreal(hi), to_extreal(tol)
    if not tol > 0:
        raise ValueError(f"Tolerance must be positive, got {tol}")
    if rf_poles(f, lo, hi):
        raise errors.InteriorPole(f"{f} has a pole inside ({lo}, {hi})")
    left = rf_limit(f, lo, "right")
    right = rf_limit(f, hi, "left")
    if is_infinite(left) or is_infinite(right):
        return Enclosure(POS_INF, POS_INF, tol)
    best_lo = max(abs(left), abs(right))
    best_hi = best_lo
    if f.is_constant:
        return Enclosure(best_lo, best_hi, tol)
    derivative = rf_derivative(f)
    if derivative.is_zero:
        return Enclosure(best_lo, best_hi, tol)
    critical = rf_roots(derivative, lo, hi)
    refinements = 0
    for root in critical:
        if root.is_exact:
            value = abs(rf_eval(f, root.value))
            best_lo = max(best_lo, value)
            best_hi = max(best_hi, value)
            continue
        while True:
            upper, root = _abs_enclosure_upper(f, root)
            attained = max(abs(rf_eval(f, root.lo)), abs(rf_eval(f, root.hi)))
            if upper <= best_lo or upper - attained <= tol:
                break
            root = root.bisect()
            refinements += 1
        best_lo = max(best_lo, attained)
        best_hi = max(best_hi, upper)
    if best_hi < best_lo:
        best_hi = best_lo
    logger.debug(f"Supremum of |{f}| on ({lo}, {hi}) enclosed in [{best_lo}, {best_hi}] after {refinements} "
                 f"refinement steps")
    return Enclosure(best_lo, best_hi, tol)


def format_poly(poly: Poly) -> str:
    """
    Formats an integer polynomial in the textual syntax, e.g. "3*x^2 - x + 1".
    """
    coeffs = [int(c) for c in poly.all_coeffs()]
    degree = len(coeffs) - 1
    terms = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        power = degree - i
        magnitude = abs(c)
        if power == 0:
            body = str(magnitude)
        else:
            monomial = "x" if power == 1 else f"x^{power}"
            body = monomial if magnitude == 1 else f"{magnitude}*{monomial}"
        if not terms:
            terms.append(f"-{body}" if c < 0 else body)
        else:
            terms.append(f"- {body}" if c < 0 else f"+ {body}")
    return " ".join(terms) if terms else "0"


def _term_count(poly: Poly) -> int:
    return sum(1 for c in poly.all_coeffs() if c != 0)


def format_rational_func(f: RationalFunc) -> str:
    num_text = format_poly(f.num)
    if f.is_polynomial and f.den_coeffs[-1] == 1:
        return num_text
    if _term_count(f.num) > 1:
        num_text = f"({num_text})"
    den_text = format_poly(f.den)
    bare = f.den.degree() == 0 or (_term_count(f.den) == 1 and f.den.LC() == 1)
    if not bare:
        den_text = f"({den_text})"
    return f"{num_text}/{den_text}"
