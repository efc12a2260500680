"""
Interval valued piecewise rational functions on a compact rational interval [a, b].

A PiecewiseFn stores strictly increasing rational breakpoints (the domain ends included), one extended interval value
per breakpoint and, for every open segment between consecutive breakpoints, a pair (lo, hi) of rational functions
without poles inside the segment. Infinite values can therefore only occur at breakpoints, which makes every
representable function nearly finite.
"""
import bisect
import logging
from functools import cached_property
from typing import List, Tuple

from hnfpyalgebra import errors
from hnfpyalgebra.intervals import XInterval, to_extreal, width, is_infinite
from hnfpyalgebra.rationals import (RationalFunc, IsolatedRoot, as_rational_func, rf_eval, rf_limit, rf_poles,
                                    rf_sign_pattern, rf_nonnegative, rf_positive_on_closure, rf_roots)

logger = logging.getLogger(__name__)


def _as_value(value):
    if value is None or isinstance(value, XInterval):
        return value
    if isinstance(value, (tuple, list)):
        return XInterval(value[0], value[1])
    return XInterval(value)


def _as_segment(segment) -> Tuple[RationalFunc, RationalFunc]:
    if isinstance(segment, (tuple, list)):
        return as_rational_func(segment[0]), as_rational_func(segment[1])
    f = as_rational_func(segment)
    return f, f


class PiecewiseFn:
    """
    Interval valued piecewise rational function. Values may be None at breakpoints of a partial function that is
    waiting for dense extension.
    """

    def __init__(self, breakpoints, values, segments):
        """
        Creates a new PiecewiseFn after structural checks only. Use pw_build for full validation.

        Parameters
        ----------
        breakpoints: sequence
            Strictly increasing rationals; the first and last one are the domain ends
        values: sequence
            One XInterval (or None) per breakpoint
        segments: sequence
            One (lo, hi) pair of RationalFunc per open segment
        """
        breakpoints = tuple(to_extreal(b) for b in breakpoints)
        if len(breakpoints) < 2:
            raise errors.UnsortedBreakpoints("A domain needs at least its two end points")
        if any(is_infinite(b) for b in breakpoints):
            raise errors.UnsortedBreakpoints("Breakpoints must be finite rationals")
        for i, (p, q) in enumerate(zip(breakpoints, breakpoints[1:])):
            if not p < q:
                raise errors.UnsortedBreakpoints(f"Breakpoints are not strictly increasing at {p}, {q}",
                                                 segment_index=i)
        values = tuple(_as_value(v) for v in values)
        segments = tuple(_as_segment(s) for s in segments)
        if len(values) != len(breakpoints):
            raise ValueError(f"Expected {len(breakpoints)} breakpoint values, got {len(values)}")
        if len(segments) != len(breakpoints) - 1:
            raise ValueError(f"Expected {len(breakpoints) - 1} segments, got {len(segments)}")
        self.__breakpoints = breakpoints
        self.__values = values
        self.__segments = segments

    @property
    def domain(self) -> tuple:
        return self.__breakpoints[0], self.__breakpoints[-1]

    @property
    def breakpoints(self) -> tuple:
        return self.__breakpoints

    @property
    def values(self) -> tuple:
        return self.__values

    @property
    def segments(self) -> tuple:
        return self.__segments

    @property
    def is_partial(self) -> bool:
        return any(v is None for v in self.__values)

    def segment_bounds(self, i: int) -> tuple:
        return self.__breakpoints[i], self.__breakpoints[i + 1]

    def limit_hull(self, j: int) -> XInterval:
        """
        Hull of the one-sided limits at breakpoint j: [min of the adjacent lo limits, max of the adjacent hi limits].
        Only the inner side is used at the domain ends.
        """
        point = self.__breakpoints[j]
        lows, highs = [], []
        if j > 0:
            lo, hi = self.__segments[j - 1]
            lows.append(rf_limit(lo, point, "left"))
            highs.append(rf_limit(hi, point, "left"))
        if j < len(self.__segments):
            lo, hi = self.__segments[j]
            lows.append(rf_limit(lo, point, "right"))
            highs.append(rf_limit(hi, point, "right"))
        return XInterval(min(lows), max(highs))

    @cached_property
    def is_point_valued(self) -> bool:
        return all(lo == hi for lo, hi in self.__segments)

    @cached_property
    def is_s_continuous(self) -> bool:
        if self.is_partial:
            return False
        return all(self.limit_hull(j).issubset(v) for j, v in enumerate(self.__values))

    @cached_property
    def is_quasi_minimal(self) -> bool:
        return self.is_s_continuous and self.is_point_valued

    @cached_property
    def is_h_continuous(self) -> bool:
        return self.is_quasi_minimal and all(self.limit_hull(j) == v for j, v in enumerate(self.__values))

    @cached_property
    def is_finite(self) -> bool:
        return not self.is_partial and not any(v.touches_infinity for v in self.__values)

    @property
    def is_nearly_finite(self) -> bool:
        # the infinite set is contained in the finite breakpoint set
        return not self.is_partial

    def __eq__(self, other):
        if not isinstance(other, PiecewiseFn):
            return NotImplemented
        return (self.__breakpoints == other.breakpoints and self.__values == other.values
                and self.__segments == other.segments)

    def __hash__(self):
        return hash((self.__breakpoints, self.__values, self.__segments))

    def __repr__(self):
        parts = []
        for j, point in enumerate(self.__breakpoints):
            parts.append(f"{point}: {self.__values[j]}")
            if j < len(self.__segments):
                lo, hi = self.__segments[j]
                body = str(lo) if lo == hi else f"{lo} .. {hi}"
                parts.append(f"({point},{self.__breakpoints[j + 1]}): {body}")
        return f"PiecewiseFn({'; '.join(parts)})"


def pw_build(domain, breakpoints, values, segments) -> PiecewiseFn:
    """
    Builds and validates a piecewise function.

    Parameters
    ----------
    domain: tuple
        Closed rational domain (a, b)
    breakpoints: sequence
        Strictly increasing rationals starting at a and ending at b
    values: sequence
        Interval value per breakpoint (XInterval, (lo, hi) pair, scalar or None)
    segments: sequence
        Per open segment either a rational function or a (lo, hi) pair of rational functions

    Returns
    -------
    PiecewiseFn
        Validated function; its classification flags are available as properties

    """
    a, b = to_extreal(domain[0]), to_extreal(domain[1])
    if not a < b:
        raise errors.UnsortedBreakpoints(f"Domain [{a}, {b}] is empty or degenerate")
    f = PiecewiseFn(breakpoints, values, segments)
    if f.domain != (a, b):
        raise errors.UnsortedBreakpoints(f"Breakpoints must start at {a} and end at {b}")
    for i, (lo, hi) in enumerate(f.segments):
        left, right = f.segment_bounds(i)
        for fn in {lo, hi}:
            if rf_poles(fn, left, right):
                raise errors.InteriorPole(f"{fn} has a pole inside ({left}, {right})", segment_index=i)
        if lo != hi and not rf_nonnegative(hi - lo, left, right):
            raise errors.SegmentOrderViolation(f"Lower function {lo} exceeds upper function {hi} on "
                                               f"({left}, {right})", segment_index=i)
    logger.debug(f"Built piecewise function on [{a}, {b}] with {len(f.segments)} segments")
    return f


def pw_constant(value, domain) -> PiecewiseFn:
    a, b = to_extreal(domain[0]), to_extreal(domain[1])
    c = as_rational_func(value)
    v = XInterval(c.constant_value())
    return PiecewiseFn((a, b), (v, v), ((c, c),))


def pw_from_rational(f: RationalFunc, domain) -> PiecewiseFn:
    """
    Builds the H-continuous function of a single rational expression on a domain: interior poles become breakpoints
    (they must be rational) and all values are completed by one-sided limits.
    """
    a, b = to_extreal(domain[0]), to_extreal(domain[1])
    poles = rf_poles(f, a, b)
    for pole in poles:
        if not pole.is_exact:
            raise errors.NonRepresentablePoint(f"{f} has an irrational pole in ({pole.lo}, {pole.hi})",
                                               isolating_interval=(pole.lo, pole.hi))
    points = [a] + [p.value for p in poles] + [b]
    partial = PiecewiseFn(points, [None] * len(points), [(f, f)] * (len(points) - 1))
    return pw_extend_dense(partial)


def pw_eval(f: PiecewiseFn, x) -> XInterval:
    """
    Value of f at a rational point of its domain.
    """
    x = to_extreal(x)
    a, b = f.domain
    if is_infinite(x) or x < a or x > b:
        raise errors.OutOfDomain(f"{x} is outside the domain [{a}, {b}]")
    j = bisect.bisect_left(f.breakpoints, x)
    if j < len(f.breakpoints) and f.breakpoints[j] == x:
        if f.values[j] is None:
            raise ValueError(f"No value stored at breakpoint {x} of a partial function")
        return f.values[j]
    lo, hi = f.segments[j - 1]
    return XInterval(rf_eval(lo, x), rf_eval(hi, x))


def segment_index(f: PiecewiseFn, x) -> int:
    """
    Index of the open segment containing a non-breakpoint x.
    """
    return bisect.bisect_left(f.breakpoints, to_extreal(x)) - 1


def refine_to(f: PiecewiseFn, points) -> PiecewiseFn:
    """
    Rewrites f over a superset of its breakpoints; new breakpoints get the exact segment values.
    """
    points = sorted(set(points) | set(f.breakpoints))
    if points[0] != f.domain[0] or points[-1] != f.domain[1]:
        raise errors.OutOfDomain(f"Refinement points leave the domain [{f.domain[0]}, {f.domain[1]}]")
    if len(points) == len(f.breakpoints):
        return f
    own = {p: v for p, v in zip(f.breakpoints, f.values)}
    values, segments = [], []
    i = 0
    for k, p in enumerate(points):
        if p in own:
            values.append(own[p])
        else:
            lo, hi = f.segments[i]
            values.append(XInterval(rf_eval(lo, p), rf_eval(hi, p)))
        if k < len(points) - 1:
            while f.breakpoints[i + 1] <= p:
                i += 1
            segments.append(f.segments[i])
    return PiecewiseFn(points, values, segments)


def pw_split(f: PiecewiseFn, points) -> PiecewiseFn:
    """
    Inserts breakpoints without evaluating anything: existing values are kept, new breakpoints get no value. Used
    before segment functions are replaced by ones with poles at the new points.
    """
    points = sorted(set(points) | set(f.breakpoints))
    own = {p: v for p, v in zip(f.breakpoints, f.values)}
    values = [own.get(p) for p in points]
    segments = [f.segments[segment_index(f, (p + q) / 2)] for p, q in zip(points, points[1:])]
    return PiecewiseFn(points, values, segments)


def check_same_domain(f: PiecewiseFn, g: PiecewiseFn):
    if f.domain != g.domain:
        raise errors.DomainMismatch(f"Domains [{f.domain[0]}, {f.domain[1]}] and [{g.domain[0]}, {g.domain[1]}] "
                                    f"differ")


def pw_refine(f: PiecewiseFn, g: PiecewiseFn) -> Tuple[PiecewiseFn, PiecewiseFn]:
    """
    Rewrites both functions over the union of their breakpoint sets without changing any value.
    """
    check_same_domain(f, g)
    points = set(f.breakpoints) | set(g.breakpoints)
    return refine_to(f, points), refine_to(g, points)


def refine_all(fs: List[PiecewiseFn]) -> List[PiecewiseFn]:
    for g in fs[1:]:
        check_same_domain(fs[0], g)
    points = set()
    for f in fs:
        points |= set(f.breakpoints)
    return [refine_to(f, points) for f in fs]


def _removable(f: PiecewiseFn, j: int) -> bool:
    left, right = f.segments[j - 1], f.segments[j]
    if left != right or f.values[j] is None:
        return False
    point = f.breakpoints[j]
    lo, hi = left
    if lo.den_vanishes_at(point) or hi.den_vanishes_at(point):
        return False
    return f.values[j] == XInterval(rf_eval(lo, point), rf_eval(hi, point))


def pw_canon(f: PiecewiseFn) -> PiecewiseFn:
    """
    Deletes removable breakpoints: interior breakpoints with identical adjacent segments whose stored value is the
    segment value there. The result is the unique minimal representation.
    """
    keep = [0] + [j for j in range(1, len(f.breakpoints) - 1) if not _removable(f, j)] + [len(f.breakpoints) - 1]
    if len(keep) == len(f.breakpoints):
        return f
    segments = [f.segments[j] for j in keep[:-1]]
    return PiecewiseFn([f.breakpoints[j] for j in keep], [f.values[j] for j in keep], segments)


def pw_equal(f: PiecewiseFn, g: PiecewiseFn) -> bool:
    check_same_domain(f, g)
    return pw_canon(f) == pw_canon(g)


def pw_restrict(f: PiecewiseFn, lo, hi) -> PiecewiseFn:
    """
    Restriction of f to the closure of the open interval (lo, hi); the new boundary values are the one-sided limits
    from inside.

    Parameters
    ----------
    f: PiecewiseFn
        Function
    lo:
        Left end of the open subinterval
    hi:
        Right end of the open subinterval

    Returns
    -------
    PiecewiseFn
        Function on [lo, hi]

    """
    lo, hi = to_extreal(lo), to_extreal(hi)
    a, b = f.domain
    if not (a <= lo < hi <= b):
        raise errors.OutOfDomain(f"({lo}, {hi}) is not an open subinterval of [{a}, {b}]")
    inner = [j for j, p in enumerate(f.breakpoints) if lo < p < hi]
    points = [lo] + [f.breakpoints[j] for j in inner] + [hi]
    segments = []
    for p, q in zip(points, points[1:]):
        segments.append(f.segments[segment_index(f, (p + q) / 2)])
    first_lo, first_hi = segments[0]
    last_lo, last_hi = segments[-1]
    values = ([XInterval(rf_limit(first_lo, lo, "right"), rf_limit(first_hi, lo, "right"))]
              + [f.values[j] for j in inner]
              + [XInterval(rf_limit(last_lo, hi, "left"), rf_limit(last_hi, hi, "left"))])
    return PiecewiseFn(points, values, segments)


def pw_restrict_components(f: PiecewiseFn, components) -> List[PiecewiseFn]:
    """
    Restriction to a finite union of disjoint open intervals, one function per component.
    """
    return [pw_restrict(f, lo, hi) for lo, hi in components]


def pw_fill_values(f: PiecewiseFn, overwrite: bool = False) -> PiecewiseFn:
    """
    Sets breakpoint values to the hull of the one-sided limits: only the missing ones, or all of them if overwrite
    is set.
    """
    values = [f.limit_hull(j) if (overwrite or v is None) else v for j, v in enumerate(f.values)]
    return PiecewiseFn(f.breakpoints, values, f.segments)


def pw_extend_dense(partial: PiecewiseFn) -> PiecewiseFn:
    """
    Unique H-continuous completion of a function known off its breakpoints: each missing breakpoint value becomes
    [min of the one-sided limits, max of the one-sided limits].
    """
    return pw_fill_values(partial, overwrite=False)


def pw_subset(h: PiecewiseFn, g: PiecewiseFn) -> bool:
    """
    Certified pointwise inclusion h(x) within g(x) for all x.
    """
    h, g = pw_refine(h, g)
    if not all(hv.issubset(gv) for hv, gv in zip(h.values, g.values)):
        return False
    for i, ((h_lo, h_hi), (g_lo, g_hi)) in enumerate(zip(h.segments, g.segments)):
        left, right = h.segment_bounds(i)
        if not (rf_nonnegative(h_lo - g_lo, left, right) and rf_nonnegative(g_hi - h_hi, left, right)):
            return False
    return True


def pw_leq(f: PiecewiseFn, g: PiecewiseFn, strict: bool = False) -> bool:
    """
    Pointwise order: lower(f) <= lower(g) and upper(f) <= upper(g) everywhere, certified by sign analysis on the
    segments and comparison at the breakpoints.

    Parameters
    ----------
    f: PiecewiseFn
        Left-hand side
    g: PiecewiseFn
        Right-hand side
    strict: bool
        Require both differences to stay positive on the closure of every segment and at every breakpoint where
        neither value touches an infinity

    Returns
    -------
    bool

    """
    f, g = pw_refine(f, g)
    for fv, gv in zip(f.values, g.values):
        if strict and not (fv.touches_infinity or gv.touches_infinity):
            if not (fv.lo < gv.lo and fv.hi < gv.hi):
                return False
        elif not (fv.lo <= gv.lo and fv.hi <= gv.hi):
            return False
    check = rf_positive_on_closure if strict else rf_nonnegative
    for i, ((f_lo, f_hi), (g_lo, g_hi)) in enumerate(zip(f.segments, g.segments)):
        left, right = f.segment_bounds(i)
        if not (check(g_lo - f_lo, left, right) and check(g_hi - f_hi, left, right)):
            return False
    return True


class StructuralSets:
    """
    Structured descriptors of the exceptional sets of a function: W_f, W_{f,eps}, Gamma_f, Z(f) and coz(f).

    Point sets are lists of rationals or IsolatedRoot objects, interval sets are lists of (left, right) pairs whose
    ends are rationals or IsolatedRoot objects.
    """

    def __init__(self, f: PiecewiseFn):
        self.__f = f
        self.__w_points = [p for p, v in zip(f.breakpoints, f.values) if v.is_proper]
        self.__w_segments = [f.segment_bounds(i) for i, (lo, hi) in enumerate(f.segments) if lo != hi]
        self.__gamma = [p for p, v in zip(f.breakpoints, f.values) if v.touches_infinity]
        zero_points = [p for p, v in zip(f.breakpoints, f.values) if v.contains(0)]
        zero_intervals = []
        for i, (lo, hi) in enumerate(f.segments):
            points, intervals = _segment_zero_set(lo, hi, *f.segment_bounds(i))
            zero_points.extend(points)
            zero_intervals.extend(intervals)
        self.__zero_points = sorted(zero_points, key=_position)
        self.__zero_intervals = zero_intervals

    @property
    def w_points(self) -> list:
        return self.__w_points

    @property
    def w_segments(self) -> list:
        return self.__w_segments

    @property
    def gamma(self) -> list:
        return self.__gamma

    @property
    def zero_points(self) -> list:
        return self.__zero_points

    @property
    def zero_intervals(self) -> list:
        return self.__zero_intervals

    @property
    def zero_set_has_interior(self) -> bool:
        return bool(self.__zero_intervals)

    def w_eps(self, eps) -> tuple:
        """
        W_{f,eps}: breakpoints whose value is at least eps wide, and segments on which the width reaches eps on an
        open subset.
        """
        eps = to_extreal(eps)
        if not eps > 0:
            raise ValueError(f"Width threshold must be positive, got {eps}")
        points = [p for p, v in zip(self.__f.breakpoints, self.__f.values) if width(v) >= eps]
        segments = []
        for i, (lo, hi) in enumerate(self.__f.segments):
            if lo == hi:
                continue
            left, right = self.__f.segment_bounds(i)
            excess = hi - lo - eps
            pattern = rf_sign_pattern(excess, left, right, check_poles=False)
            if excess.is_zero or any(s > 0 for s in pattern.signs):
                segments.append((left, right))
        return points, segments

    def coz_contains(self, x) -> bool:
        return not pw_eval(self.__f, x).contains(0)


def _position(point):
    return point.lo if isinstance(point, IsolatedRoot) else point


def _segment_zero_set(lo: RationalFunc, hi: RationalFunc, left, right) -> tuple:
    if lo == hi:
        if lo.is_zero:
            return [], [(left, right)]
        return list(rf_roots(lo, left, right)), []
    pattern = rf_sign_pattern(lo * hi, left, right, check_poles=False)
    inside = [rf_eval(lo, t) <= 0 <= rf_eval(hi, t) for t in pattern.test_points]
    points, intervals = [], []
    start = None
    for i, flag in enumerate(inside):
        gap_left, gap_right = pattern.gap_bounds(i)
        if flag and start is None:
            start = gap_left
        if start is not None and (not flag or i == len(inside) - 1):
            end = gap_right if flag else gap_left
            intervals.append((start, end))
            start = None
        if i < len(pattern.roots):
            root = pattern.roots[i]
            touching = flag or inside[i + 1]
            if not touching:
                points.append(root)
    return points, intervals


def pw_sets(f: PiecewiseFn) -> StructuralSets:
    if f.is_partial:
        raise ValueError("Structural sets need a function with all breakpoint values")
    return StructuralSets(f)


def format_region(region) -> str:
    def end(e):
        if isinstance(e, IsolatedRoot):
            return str(e.lo) if e.is_exact else f"root in ({e.lo},{e.hi})"
        return str(e)

    if isinstance(region, tuple):
        return f"({end(region[0])},{end(region[1])})"
    return end(region)
