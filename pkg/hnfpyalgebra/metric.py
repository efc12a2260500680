"""
Metric, order and lattice structure: certified enclosures of the bounded metric rho, the order-ball equivalence,
binary lattice operations, envelopes and limits of Cauchy sequences, interposition of a continuous function between
semicontinuous bounds, and the density approximation by functions with small defects.
"""
import logging
from typing import List, Tuple

import dask
from sympy import Rational

from hnfpyalgebra import errors
from hnfpyalgebra.intervals import XInterval, to_extreal, width, is_infinite, NEG_INF, POS_INF
from hnfpyalgebra.piecewise import (PiecewiseFn, check_same_domain, pw_canon, pw_constant, pw_eval, pw_extend_dense,
                                    pw_leq, pw_refine)
from hnfpyalgebra.rationals import (DEFAULT_TOLERANCE, Enclosure, Verdict, rf_constant, rf_eval, rf_identity, rf_limit,
                                    rf_nonnegative, rf_sign_pattern, rf_sup_abs)
from hnfpyalgebra.regularize import h_extract
from hnfpyalgebra.ring import classify, h_add, h_sub, require_h_continuous

logger = logging.getLogger(__name__)

DEFAULT_SCHEDULER = "synchronous"
DEFAULT_BRIDGE_FLOOR_EXPONENT = 20
REFINEMENT_ATTEMPTS = 3
REFINEMENT_FACTOR = 1000


def _bounded(t):
    if is_infinite(t):
        return Rational(1)
    return t / (1 + t)


def rho(f: PiecewiseFn, g: PiecewiseFn, tol=DEFAULT_TOLERANCE, scheduler: str = DEFAULT_SCHEDULER) -> Enclosure:
    """
    Certified enclosure of rho(f, g), the supremum of |f - g| / (1 + |f - g|) off the infinite sets of f and g.

    The supremum of |f - g| is enclosed segment by segment; the segment enclosures are independent and evaluated as
    dask delayed tasks.

    Parameters
    ----------
    f: PiecewiseFn
        H-continuous function
    g: PiecewiseFn
        H-continuous function on the same domain
    tol:
        Positive rational tolerance for the enclosure width
    scheduler: str
        Dask scheduler used for the segment tasks

    Returns
    -------
    Enclosure
        Enclosure within [0, 1]; exactly 1 if f - g is unbounded

    """
    check_same_domain(f, g)
    tol = to_extreal(tol)
    difference = h_sub(f, g)
    tasks = []
    for i, (lo, _) in enumerate(difference.segments):
        left, right = difference.segment_bounds(i)
        tasks.append(dask.delayed(rf_sup_abs)(lo, left, right, tol))
    suprema = dask.compute(*tasks, scheduler=scheduler)
    sup_lo = max(s.lo for s in suprema)
    sup_hi = max(s.hi for s in suprema)
    logger.debug(f"Supremum of |f - g| over {len(suprema)} segments enclosed in [{sup_lo}, {sup_hi}]")
    return Enclosure(_bounded(sup_lo), _bounded(sup_hi), tol)


def _decide(decision, tol):
    """
    Evaluates an enclosure based decision, shrinking the tolerance while the verdict is undecidable.
    """
    verdict = decision(tol)
    attempts = 0
    while verdict is Verdict.UNDECIDABLE and attempts < REFINEMENT_ATTEMPTS:
        tol = tol / REFINEMENT_FACTOR
        verdict = decision(tol)
        attempts += 1
    return verdict


class OrderBallReport:
    """
    Verdicts of the three equivalent descriptions of the ball {f : rho(f, g) < eps}
    """

    def __init__(self, eps, rho_verdict: Verdict, bound_verdict: Verdict, sandwich_verdict: Verdict):
        self.__eps = eps
        self.__rho_verdict = rho_verdict
        self.__bound_verdict = bound_verdict
        self.__sandwich_verdict = sandwich_verdict

    @property
    def eps(self):
        return self.__eps

    @property
    def rho_verdict(self) -> Verdict:
        return self.__rho_verdict

    @property
    def bound_verdict(self) -> Verdict:
        return self.__bound_verdict

    @property
    def sandwich_verdict(self) -> Verdict:
        return self.__sandwich_verdict

    @property
    def verdicts(self) -> tuple:
        return self.__rho_verdict, self.__bound_verdict, self.__sandwich_verdict

    @property
    def decidable(self) -> bool:
        return Verdict.UNDECIDABLE not in self.verdicts

    @property
    def agree(self) -> bool:
        return len(set(self.verdicts)) == 1


def order_ball_check(f: PiecewiseFn, g: PiecewiseFn, eps, tol=DEFAULT_TOLERANCE,
                     scheduler: str = DEFAULT_SCHEDULER) -> OrderBallReport:
    """
    Evaluates rho(f, g) < eps, the two-sided bound |f - g| < eps / (1 - eps) and the shifted sandwich
    g - eps / (1 - eps) < f < g + eps / (1 - eps). All three are decided strictly off the infinite sets.

    Parameters
    ----------
    f: PiecewiseFn
        H-continuous function
    g: PiecewiseFn
        H-continuous function on the same domain
    eps:
        Rational radius in (0, 1)
    tol:
        Initial tolerance of the rho enclosure
    scheduler: str
        Dask scheduler for the rho computation

    Returns
    -------
    OrderBallReport

    """
    check_same_domain(f, g)
    eps = to_extreal(eps)
    if not (0 < eps < 1):
        raise errors.EpsOutOfRange(f"eps must lie in (0, 1), got {eps}")
    tol = to_extreal(tol)
    bound = eps / (1 - eps)
    rho_verdict = _decide(lambda t: rho(f, g, t, scheduler).below(eps), tol)

    difference = h_sub(f, g)
    upper = pw_constant(bound, f.domain)
    lower = pw_constant(-bound, f.domain)
    bound_verdict = Verdict.of(pw_leq(lower, difference, strict=True) and pw_leq(difference, upper, strict=True))
    sandwich_verdict = Verdict.of(pw_leq(h_add(g, lower), f, strict=True) and pw_leq(f, h_add(g, upper), strict=True))
    report = OrderBallReport(eps, rho_verdict, bound_verdict, sandwich_verdict)
    if report.decidable and not report.agree:
        logger.warning(f"Order ball verdicts disagree for eps={eps}: {[v.value for v in report.verdicts]}")
    return report


def _lattice2(f: PiecewiseFn, g: PiecewiseFn, take_max: bool) -> PiecewiseFn:
    check_same_domain(f, g)
    require_h_continuous(f, g)
    f, g = pw_refine(f, g)
    points, segments = [f.breakpoints[0]], []
    for i, ((f_fn, _), (g_fn, _)) in enumerate(zip(f.segments, g.segments)):
        left, right = f.segment_bounds(i)
        pattern = rf_sign_pattern(f_fn - g_fn, left, right, check_poles=False)
        signs = pattern.signs
        for k, root in enumerate(pattern.roots):
            if signs[k] == signs[k + 1]:
                continue
            if not root.is_exact:
                raise errors.NonRepresentablePoint(f"{f_fn} and {g_fn} cross at an irrational point in "
                                                   f"({root.lo}, {root.hi})",
                                                   isolating_interval=(root.lo, root.hi), segment_index=i)
            segments.append(f_fn if signs[k] == 0 or (signs[k] > 0) == take_max else g_fn)
            points.append(root.value)
        segments.append(f_fn if signs[-1] == 0 or (signs[-1] > 0) == take_max else g_fn)
        points.append(right)
    own = {}
    pick = max if take_max else min
    for p, fv, gv in zip(f.breakpoints, f.values, g.values):
        own[p] = XInterval(pick(fv.lo, gv.lo), pick(fv.hi, gv.hi))
    values = [own.get(p) for p in points]
    raw = pw_extend_dense(PiecewiseFn(points, values, [(s, s) for s in segments]))
    return h_extract(raw)


def h_sup2(f: PiecewiseFn, g: PiecewiseFn) -> PiecewiseFn:
    """
    Least upper bound of two H-continuous functions: the pointwise maximum, with new breakpoints where the segment
    functions cross, regularized to its H-continuous member.
    """
    return _lattice2(f, g, take_max=True)


def h_inf2(f: PiecewiseFn, g: PiecewiseFn) -> PiecewiseFn:
    """
    Greatest lower bound of two H-continuous functions, dual to h_sup2.
    """
    return _lattice2(f, g, take_max=False)


def finite_envelopes(fs: List[PiecewiseFn]) -> Tuple[List[PiecewiseFn], List[PiecewiseFn]]:
    """
    Lower and upper envelopes of the tails of a finite sequence: phis[k] is the infimum and psis[k] the supremum of
    fs[k:].

    Parameters
    ----------
    fs: list of PiecewiseFn
        Non-empty sequence of H-continuous functions on one domain

    Returns
    -------
    (list of PiecewiseFn, list of PiecewiseFn)
        Increasing lower envelopes and decreasing upper envelopes

    """
    if not fs:
        raise ValueError("Envelopes need at least one function")
    require_h_continuous(*fs)
    phis, psis = [fs[-1]], [fs[-1]]
    for f in reversed(fs[:-1]):
        phis.insert(0, h_inf2(f, phis[0]))
        psis.insert(0, h_sup2(f, psis[0]))
    return phis, psis


def cauchy_limit(fs: List[PiecewiseFn], moduli: list, tol=DEFAULT_TOLERANCE,
                 scheduler: str = DEFAULT_SCHEDULER) -> Tuple[PiecewiseFn, Enclosure]:
    """
    Limit candidate of a finite Cauchy sequence with convergence moduli, with a certified bound on its distance to any
    limit of the sequence.

    Parameters
    ----------
    fs: list of PiecewiseFn
        Sequence f_0, ..., f_N
    moduli: list
        Decreasing rationals in (0, 1) with rho(f_i, f_j) <= moduli[min(i, j)]; at least N entries
    tol:
        Initial tolerance of the pairwise rho enclosures
    scheduler: str
        Dask scheduler for the rho computations

    Returns
    -------
    (PiecewiseFn, Enclosure)
        f_N and the enclosure [0, m / (1 - m)] with m = moduli[N - 1]

    """
    if not fs:
        raise ValueError("A Cauchy sequence needs at least one function")
    moduli = [to_extreal(m) for m in moduli]
    if not moduli or len(moduli) < len(fs) - 1:
        raise ValueError(f"Expected at least {max(len(fs) - 1, 1)} moduli, got {len(moduli)}")
    if any(not (0 < m < 1) for m in moduli):
        raise errors.EpsOutOfRange(f"Moduli must lie in (0, 1), got {[str(m) for m in moduli]}")
    if any(m < n for m, n in zip(moduli, moduli[1:])):
        raise ValueError("Moduli must be decreasing")
    tol = to_extreal(tol)
    for i in range(len(fs)):
        for j in range(i + 1, len(fs)):
            verdict = _decide(lambda t: rho(fs[i], fs[j], t, scheduler).at_most(moduli[i]), tol)
            if verdict is not Verdict.TRUE:
                raise errors.ModulusViolated(f"rho(f_{i}, f_{j}) is not certified to be at most {moduli[i]}")
    phis, psis = finite_envelopes(fs)
    zero = pw_constant(0, fs[0].domain)
    for k in range(min(len(fs), len(moduli))):
        spread = h_sub(psis[k], phis[k])
        m = moduli[k]
        pinch = pw_constant(2 * m / (1 - m), fs[0].domain)
        if not (pw_leq(zero, spread) and pw_leq(spread, pinch)):
            raise errors.ModulusViolated(f"Envelopes of the tail starting at {k} are not pinched by {2 * m / (1 - m)}")
    m = moduli[max(len(fs) - 2, 0)]
    bound = Enclosure(0, m / (1 - m), tol)
    logger.debug(f"Limit candidate is f_{len(fs) - 1} with distance bound {bound.hi}")
    return fs[-1], bound


def _upper_side(f: PiecewiseFn) -> tuple:
    return [hi for _, hi in f.segments], [v.hi for v in f.values]


def _lower_side(f: PiecewiseFn) -> tuple:
    return [lo for lo, _ in f.segments], [v.lo for v in f.values]


def _linear(x0, y0, x1, y1):
    x = rf_identity()
    return (x - x0) * ((y1 - y0) / (x1 - x0)) + y0


def _fits(line, upper_fn, lower_fn, left, right) -> bool:
    return rf_nonnegative(line - upper_fn, left, right) and rf_nonnegative(lower_fn - line, left, right)


def _power(f, k: int):
    result = rf_constant(1)
    for _ in range(k):
        result = result * f
    return result


def _end_state(uf, lf, point, side: str) -> str:
    """
    Which bound a selection has to follow next to a segment end: 'both' if both bounds are finite there, 'lower' if
    only the lower function of l is finite, 'upper' if only the upper function of u is finite, 'none' otherwise.
    """
    u_finite = not is_infinite(rf_limit(uf, point, side))
    l_finite = not is_infinite(rf_limit(lf, point, side))
    if u_finite and l_finite:
        return "both"
    if l_finite:
        return "lower"
    if u_finite:
        return "upper"
    return "none"


def _opens_gap(uf, lf, point, side: str) -> bool:
    return rf_limit(uf, point, side) == NEG_INF and rf_limit(lf, point, side) == POS_INF


def _segment_selection(uf, lf, left, right):
    """
    Continuous selection uf <= s <= lf on (left, right) that stays finite at every end where one of the bounds does.
    The offset g / (1 + g) of the gap g = lf - uf lies in [0, min(g, 1)], so it can be added to uf or subtracted from
    lf without leaving the gap.
    """
    states = {_end_state(uf, lf, left, "right"), _end_state(uf, lf, right, "left")}
    if "lower" not in states and "upper" not in states:
        return (uf + lf) * Rational(1, 2)
    gap = lf - uf
    offset = gap / (gap + 1)
    above_u, below_l = uf + offset, lf - offset
    if "lower" not in states:
        return above_u
    if "upper" not in states:
        return below_l
    # u is unbounded at one end and l at the other: blend with weights of higher contact order than either pole
    order = max(uf.den.degree(), lf.den.degree()) + 1
    t = (rf_identity() - left) * (1 / (right - left))
    near_left, near_right = _power(1 - t, order), _power(t, order)
    weight = near_left / (near_left + near_right)
    if _end_state(uf, lf, left, "right") == "upper":
        return weight * above_u + (1 - weight) * below_l
    return weight * below_l + (1 - weight) * above_u


def _anchor(u_value, l_value):
    anchor = min(max(Rational(0), u_value), l_value)
    if is_infinite(anchor):
        raise errors.BridgingFailed(f"No finite value lies between {u_value} and {l_value}")
    return anchor


def _gap_cut(uf, lf, anchor, left, right, at_left: bool, floor_exponent: int):
    """
    End of a piece next to a segment end where uf -> -oo and lf -> +oo, on which the constant anchor stays between the
    bounds.
    """
    eta = (right - left) / 4
    floor = (right - left) / 2 ** floor_exponent
    while True:
        lo, hi = (left, left + eta) if at_left else (right - eta, right)
        if rf_nonnegative(anchor - uf, lo, hi) and rf_nonnegative(lf - anchor, lo, hi):
            return hi if at_left else lo
        eta /= 2
        if eta < floor:
            point = left if at_left else right
            raise errors.BridgingFailed(f"No constant piece fits between the bounds next to {point}", breakpoint=point)


def _selections(uf, lf, left, right, left_values: tuple, right_values: tuple, floor_exponent: int) -> list:
    """
    Selection pieces of one segment as (right end, function) pairs. Ends where the gap opens to (-oo, +oo) get a
    constant piece, the rest of the segment gets a rational selection.
    """
    pieces = []
    start, end = left, right
    if _opens_gap(uf, lf, left, "right"):
        anchor = _anchor(*left_values)
        start = _gap_cut(uf, lf, anchor, left, right, True, floor_exponent)
        pieces.append((start, rf_constant(anchor)))
    tail = None
    if _opens_gap(uf, lf, right, "left"):
        anchor = _anchor(*right_values)
        end = _gap_cut(uf, lf, anchor, left, right, False, floor_exponent)
        tail = (right, rf_constant(anchor))
    pieces.append((end, _segment_selection(uf, lf, start, end)))
    if tail is not None:
        pieces.append(tail)
    return pieces


def _bridge(u: PiecewiseFn, l: PiecewiseFn, skip=(), floor_exponent: int = DEFAULT_BRIDGE_FLOOR_EXPONENT):
    """
    Continuous selection between the upper function of u and the lower function of l, built segment by segment and
    joined by certified linear bridges at the breakpoints that are not skipped.
    """
    u, l = pw_refine(u, l)
    seg_u, vals_u = _upper_side(u)
    seg_l, vals_l = _lower_side(l)
    points = [u.breakpoints[0]]
    u_vals, l_vals = [vals_u[0]], [vals_l[0]]
    middle, u_fns, l_fns = [], [], []
    for i, (uf, lf) in enumerate(zip(seg_u, seg_l)):
        left, right = u.segment_bounds(i)
        for end, selection in _selections(uf, lf, left, right, (vals_u[i], vals_l[i]), (vals_u[i + 1], vals_l[i + 1]),
                                          floor_exponent):
            middle.append(selection)
            u_fns.append(uf)
            l_fns.append(lf)
            points.append(end)
            u_vals.append(vals_u[i + 1] if end == right else rf_eval(uf, end))
            l_vals.append(vals_l[i + 1] if end == right else rf_eval(lf, end))
    # per piece: optional bridge on its left end and on its right end
    left_bridges = [None] * len(middle)
    right_bridges = [None] * len(middle)
    for j in range(1, len(points) - 1):
        b = points[j]
        if b in skip:
            continue
        before, after = middle[j - 1], middle[j]
        from_left, from_right = rf_limit(before, b, "left"), rf_limit(after, b, "right")
        if is_infinite(from_left) or is_infinite(from_right):
            raise errors.BridgingFailed(f"The selection is unbounded next to breakpoint {b}", breakpoint=b)
        target = min(max((from_left + from_right) / 2, u_vals[j]), l_vals[j])
        if from_left == target == from_right:
            continue
        length = min(b - points[j - 1], points[j + 1] - b)
        delta = length / 4
        floor = length / 2 ** floor_exponent
        while True:
            start, end = b - delta, b + delta
            rise = _linear(start, rf_eval(before, start), b, target)
            fall = _linear(b, target, end, rf_eval(after, end))
            if (_fits(rise, u_fns[j - 1], l_fns[j - 1], start, b)
                    and _fits(fall, u_fns[j], l_fns[j], b, end)):
                break
            delta /= 2
            if delta < floor:
                raise errors.BridgingFailed(f"No linear bridge fits between the bounds at breakpoint {b}",
                                            breakpoint=b)
        logger.debug(f"Bridged breakpoint {b} with half-width {delta}")
        right_bridges[j - 1] = (start, rise)
        left_bridges[j] = (end, fall)
    new_points, segments = [points[0]], []
    for i, fn in enumerate(middle):
        if left_bridges[i] is not None:
            end, fall = left_bridges[i]
            segments.append(fall)
            new_points.append(end)
        if right_bridges[i] is not None:
            start, rise = right_bridges[i]
            segments.append(fn)
            new_points.append(start)
            segments.append(rise)
        else:
            segments.append(fn)
        new_points.append(points[i + 1])
    partial = PiecewiseFn(new_points, [None] * len(new_points), [(s, s) for s in segments])
    return pw_canon(pw_extend_dense(partial))


def interpose(u: PiecewiseFn, l: PiecewiseFn, floor_exponent: int = DEFAULT_BRIDGE_FLOOR_EXPONENT) -> PiecewiseFn:
    """
    Continuous function h with upper(u) <= h <= lower(l), where u is read through its upper semicontinuous upper
    function and l through its lower semicontinuous lower function.

    Parameters
    ----------
    u: PiecewiseFn
        Lower bound
    l: PiecewiseFn
        Upper bound on the same domain
    floor_exponent: int
        Bridges narrower than the adjacent segment length divided by 2 ** floor_exponent are not attempted

    Returns
    -------
    PiecewiseFn
        Canonical continuous function

    """
    check_same_domain(u, l)
    ru, rl = pw_refine(u, l)
    u_fns, u_vals = _upper_side(ru)
    l_fns, l_vals = _lower_side(rl)
    for b, uv, lv in zip(ru.breakpoints, u_vals, l_vals):
        if uv > lv:
            raise errors.SandwichViolated(f"Upper value {uv} of u exceeds lower value {lv} of l at {b}")
    for i, (uf, lf) in enumerate(zip(u_fns, l_fns)):
        left, right = ru.segment_bounds(i)
        if not rf_nonnegative(lf - uf, left, right):
            raise errors.SandwichViolated(f"u exceeds l somewhere in ({left}, {right})", segment_index=i)
    h = _bridge(u, l, floor_exponent=floor_exponent)
    if not classify(h).continuous:
        bad = [b for b, v in zip(h.breakpoints, h.values) if v.is_proper or v.touches_infinity]
        raise errors.BridgingFailed(f"Interposed function is not continuous at {bad[0]}", breakpoint=bad[0])
    return h


def _retained(f: PiecewiseFn, eps) -> set:
    return {p for p, v in zip(f.breakpoints, f.values) if width(v) >= eps or v.touches_infinity}


def density_approx(f: PiecewiseFn, n: int, floor_exponent: int = DEFAULT_BRIDGE_FLOOR_EXPONENT) -> PiecewiseFn:
    """
    Approximation f_n of f that keeps the jumps of width at least 1/n and the infinite values of f, and bridges all
    other breakpoints so that f_n is continuous there and upper(f) - 1/n <= f_n <= lower(f) + 1/n off the kept points.

    Parameters
    ----------
    f: PiecewiseFn
        H-continuous function
    n: int
        Positive integer
    floor_exponent: int
        Bridge floor passed to the interposition

    Returns
    -------
    PiecewiseFn
        H-continuous approximation with rho(f, f_n) <= 1/n

    """
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    require_h_continuous(f)
    eps = Rational(1, n)
    u = PiecewiseFn(f.breakpoints, [XInterval(v.lo - eps, v.hi - eps) for v in f.values],
                    [(lo - eps, hi - eps) for lo, hi in f.segments])
    l = PiecewiseFn(f.breakpoints, [XInterval(v.lo + eps, v.hi + eps) for v in f.values],
                    [(lo + eps, hi + eps) for lo, hi in f.segments])
    retained = _retained(f, eps)
    result = _bridge(u, l, skip=retained, floor_exponent=floor_exponent)
    logger.debug(f"Density approximation with n={n} keeps {len(retained)} breakpoints")
    return result


def sandwich_holds(f: PiecewiseFn, fn: PiecewiseFn, n: int) -> bool:
    """
    Checks upper(f) - 1/n <= lower(fn) and upper(fn) <= lower(f) + 1/n everywhere except at the breakpoints of f whose
    value is at least 1/n wide or infinite.
    """
    eps = Rational(1, n)
    retained = _retained(f, eps)
    rf, rfn = pw_refine(f, fn)
    for p in rf.breakpoints:
        if p in retained:
            continue
        fv, gv = pw_eval(rf, p), pw_eval(rfn, p)
        if not (fv.hi - eps <= gv.lo and gv.hi <= fv.lo + eps):
            return False
    for i, ((f_lo, f_hi), (g_lo, g_hi)) in enumerate(zip(rf.segments, rfn.segments)):
        left, right = rf.segment_bounds(i)
        if not (rf_nonnegative(g_lo - (f_hi - eps), left, right) and rf_nonnegative((f_lo + eps) - g_hi, left, right)):
            return False
    return True
