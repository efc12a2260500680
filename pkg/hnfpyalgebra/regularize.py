"""
Quasi-minimality and H-continuity decisions and the extraction of the unique H-continuous member of a quasi-minimal
S-continuous function.
"""
import logging
from typing import List

from hnfpyalgebra import errors
from hnfpyalgebra.piecewise import PiecewiseFn, pw_canon, pw_fill_values, pw_subset
from hnfpyalgebra.rationals import rf_eval, rf_identity, rf_nonnegative, rf_sign_pattern

logger = logging.getLogger(__name__)


def is_s_continuous(f: PiecewiseFn) -> bool:
    return f.is_s_continuous


def is_quasi_minimal(f: PiecewiseFn) -> bool:
    """
    Decides whether an S-continuous function has a unique H-continuous member, i.e. whether all its proper interval
    values are confined to the finitely many breakpoints.
    """
    if not f.is_s_continuous:
        raise errors.NotSContinuous("Quasi-minimality is only defined for S-continuous functions")
    return f.is_point_valued


def is_h_continuous(f: PiecewiseFn) -> bool:
    return f.is_h_continuous


def regularize(f: PiecewiseFn) -> PiecewiseFn:
    """
    Replaces every breakpoint value of a function with point valued segments by the hull of the one-sided limits and
    canonicalizes. The ring operations use this on their pointwise results.
    """
    if not f.is_point_valued:
        raise errors.NotQuasiMinimal("Cannot regularize a function with interval valued segments")
    result = pw_canon(pw_fill_values(f, overwrite=True))
    logger.debug(f"Regularized {len(f.breakpoints)} breakpoints down to {len(result.breakpoints)}")
    return result


def h_extract(g: PiecewiseFn) -> PiecewiseFn:
    """
    Unique H-continuous function contained in a quasi-minimal S-continuous function.

    Parameters
    ----------
    g: PiecewiseFn
        Quasi-minimal S-continuous function

    Returns
    -------
    PiecewiseFn
        Canonical H-continuous member of g

    """
    if not g.is_quasi_minimal:
        raise errors.NotQuasiMinimal("Function is not a quasi-minimal S-continuous function")
    return regularize(g)


def _wide_region(g: PiecewiseFn) -> tuple:
    """
    Index of the first segment with lo != hi together with a point m where hi - lo > 0 and a half-width delta such
    that hi - lo >= (hi - lo)(m) / 2 on [m - delta, m + delta].
    """
    for i, (lo, hi) in enumerate(g.segments):
        if lo == hi:
            continue
        left, right = g.segment_bounds(i)
        spread = hi - lo
        pattern = rf_sign_pattern(spread, left, right, check_poles=False)
        for k, s in enumerate(pattern.signs):
            if s <= 0:
                continue
            gap_left, gap_right = pattern.rational_gap(k)
            m = pattern.test_points[k]
            eps = rf_eval(spread, m) / 2
            delta = min(m - gap_left, gap_right - m) / 2
            while not rf_nonnegative(spread - eps, m - delta, m + delta):
                delta /= 2
            return i, m, eps, delta
    raise errors.NotQuasiMinimal("No segment with interval values found")


def h_members_sample(g: PiecewiseFn) -> List[PiecewiseFn]:
    """
    Samples the set of H-continuous functions contained in an S-continuous function. A quasi-minimal function yields
    its unique member. Otherwise two distinct members are built: the lower selection completed by one-sided limits, and
    the same selection lifted by a piecewise linear hat of height eps on a region where the value width exceeds 2 eps.

    Parameters
    ----------
    g: PiecewiseFn
        S-continuous function

    Returns
    -------
    List of PiecewiseFn
        One member if g is quasi-minimal, two distinct members otherwise

    """
    if not is_quasi_minimal(g):
        lower = PiecewiseFn(g.breakpoints, g.values, [(lo, lo) for lo, _ in g.segments])
        first = regularize(lower)

        i, m, eps, delta = _wide_region(g)
        left, right = g.segment_bounds(i)
        lo = g.segments[i][0]
        x = rf_identity()
        rise = lo + (x - (m - delta)) * (eps / delta)
        fall = lo - (x - (m + delta)) * (eps / delta)
        points = list(g.breakpoints[:i + 1]) + [m - delta, m, m + delta] + list(g.breakpoints[i + 1:])
        segments = ([(s, s) for s, _ in g.segments[:i]]
                    + [(lo, lo), (rise, rise), (fall, fall), (lo, lo)]
                    + [(s, s) for s, _ in g.segments[i + 1:]])
        values = list(lower.values[:i + 1]) + [None, None, None] + list(lower.values[i + 1:])
        second = regularize(PiecewiseFn(points, values, segments))
        logger.debug(f"Built a second member with a hat of height {eps} on [{m - delta}, {m + delta}] inside "
                     f"({left}, {right})")
        members = [first, second]
    else:
        members = [h_extract(g)]
    for member in members:
        if not (member.is_h_continuous and pw_subset(member, g)):
            raise RuntimeError(f"Sampled member {member} is not an H-continuous function contained in {g}")
    return members
