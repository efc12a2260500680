"""
Extended real scalars and closed extended intervals.

Scalars are exact sympy numbers: a Rational or one of the two infinities ``oo`` and ``-oo``. Indeterminate endpoint
forms such as ``-oo + oo`` or ``0 * oo`` are never produced as scalars; the interval operations resolve them to hulls.
"""
import logging
from fractions import Fraction

import sympy
from sympy import Rational, oo

logger = logging.getLogger(__name__)

POS_INF = oo
NEG_INF = -oo


def to_extreal(value):
    """
    Converts a value into an exact extended real.

    Parameters
    ----------
    value: int, str, fractions.Fraction or sympy number
        Value to convert. Strings may be "p/q", terminating decimals, "inf", "+inf" or "-inf".

    Returns
    -------
    sympy.Expr
        Either a sympy Rational in lowest terms or one of ``oo``, ``-oo``

    """
    if isinstance(value, bool):
        raise TypeError("Booleans are not scalars")
    if isinstance(value, float):
        raise TypeError(f"Floating-point value {value} is not an exact scalar")
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "+inf", "oo", "+oo"):
            return POS_INF
        if text in ("-inf", "-oo"):
            return NEG_INF
        try:
            frac = Fraction(text)
        except (ValueError, ZeroDivisionError) as ex:
            raise ValueError(f"Cannot read '{value}' as an exact rational: {ex}")
        return Rational(frac.numerator, frac.denominator)
    if isinstance(value, Fraction):
        return Rational(value.numerator, value.denominator)
    if isinstance(value, int):
        return Rational(value)
    if isinstance(value, sympy.Basic):
        if value is POS_INF or value is NEG_INF:
            return value
        if isinstance(value, Rational):
            return value
    raise TypeError(f"Unsupported scalar {value!r} of type {type(value).__name__}")


def is_infinite(value) -> bool:
    return value is POS_INF or value is NEG_INF


class XInterval:
    """
    Closed extended interval [lo, hi] with lo <= hi
    """

    __slots__ = ("__lo", "__hi")

    def __init__(self, lo, hi=None):
        """
        Creates a new XInterval. A single argument denotes a point interval.

        Parameters
        ----------
        lo:
            Lower endpoint (anything accepted by to_extreal)
        hi:
            Upper endpoint, defaults to lo
        """
        lo = to_extreal(lo)
        hi = lo if hi is None else to_extreal(hi)
        if lo > hi:
            raise ValueError(f"Interval endpoints out of order: [{lo}, {hi}]")
        self.__lo = lo
        self.__hi = hi

    @property
    def lo(self):
        return self.__lo

    @property
    def hi(self):
        return self.__hi

    @property
    def is_point(self) -> bool:
        return width(self) == 0

    @property
    def is_proper(self) -> bool:
        return not self.is_point

    @property
    def touches_infinity(self) -> bool:
        return is_infinite(self.__lo) or is_infinite(self.__hi)

    def contains(self, value) -> bool:
        value = to_extreal(value)
        return self.__lo <= value <= self.__hi

    def issubset(self, other: "XInterval") -> bool:
        return other.lo <= self.__lo and self.__hi <= other.hi

    def hull(self, other: "XInterval") -> "XInterval":
        return XInterval(min(self.__lo, other.lo), max(self.__hi, other.hi))

    def __add__(self, other):
        return add_iv(self, other)

    def __mul__(self, other):
        return mul_iv(self, other)

    def __neg__(self):
        return neg_iv(self)

    def __eq__(self, other):
        if not isinstance(other, XInterval):
            return NotImplemented
        return self.__lo == other.lo and self.__hi == other.hi

    def __hash__(self):
        return hash((self.__lo, self.__hi))

    def __repr__(self):
        return f"XInterval({self.__lo}, {self.__hi})"


def _endpoint_sum(p, q) -> tuple:
    if (p is NEG_INF and q is POS_INF) or (p is POS_INF and q is NEG_INF):
        return NEG_INF, POS_INF
    s = p + q
    return s, s


def _endpoint_product(p, q) -> tuple:
    if is_infinite(p) and q == 0:
        p, q = q, p
    if p == 0 and is_infinite(q):
        return (Rational(0), POS_INF) if q is POS_INF else (NEG_INF, Rational(0))
    s = p * q
    return s, s


def add_iv(a: XInterval, b: XInterval) -> XInterval:
    """
    Adds two extended intervals. An indeterminate endpoint sum -oo + oo contributes the hull [-oo, oo].

    Parameters
    ----------
    a: XInterval
        First summand
    b: XInterval
        Second summand

    Returns
    -------
    XInterval
        The interval hull of all resolvable endpoint sums

    """
    lows = _endpoint_sum(a.lo, b.lo)
    highs = _endpoint_sum(a.hi, b.hi)
    return XInterval(min(lows[0], highs[0]), max(lows[1], highs[1]))


def mul_iv(a: XInterval, b: XInterval) -> XInterval:
    """
    Multiplies two extended intervals. The products 0 x oo and 0 x (-oo) contribute [0, oo] and [-oo, 0].

    Parameters
    ----------
    a: XInterval
        First factor
    b: XInterval
        Second factor

    Returns
    -------
    XInterval
        [min, max] over the four endpoint products

    """
    products = [_endpoint_product(p, q) for p in (a.lo, a.hi) for q in (b.lo, b.hi)]
    return XInterval(min(p[0] for p in products), max(p[1] for p in products))


def neg_iv(a: XInterval) -> XInterval:
    return XInterval(-a.hi, -a.lo)


def width(a: XInterval):
    """
    Width of an extended interval: hi - lo if both endpoints are finite, oo if exactly one or opposite endpoints are
    infinite, and 0 for the point intervals [oo, oo] and [-oo, -oo].
    """
    if a.lo == a.hi:
        return Rational(0)
    if is_infinite(a.lo) or is_infinite(a.hi):
        return POS_INF
    return a.hi - a.lo


def modulus(a: XInterval):
    return max(abs(a.lo), abs(a.hi))


def product_width_bound(a: XInterval, b: XInterval):
    """
    Right-hand side of the product width inequality w(a x b) <= w(a)|b| + w(b)|a| for finite intervals.
    """
    if a.touches_infinity or b.touches_infinity:
        raise ValueError("The product width bound is stated for finite intervals only")
    return width(a) * modulus(b) + width(b) * modulus(a)
