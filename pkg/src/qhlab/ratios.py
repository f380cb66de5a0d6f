"""Triple ratios, cross ratios (with the point at infinity), and the
Bonk-Kleiner ratio.

The cross ratio of an ordered quadruple (x, y, z, w) is
(|x-z| / |x-y|) * (|y-w| / |z-w|); when one entry is INFINITY the two
distances through it cancel (e.g. the cross ratio of (x, y, z, INFINITY)
is |x-z| / |x-y|).  The Bonk-Kleiner ratio
(|x-z| ∧ |y-w|) / (|x-y| ∧ |z-w|) is defined for finite points only and
is dominated by theta0 of the cross ratio.
"""

from __future__ import annotations

import numpy as np

from .errors import ArgumentError, DegenerateError
from .geometry import ExtendedPoint, as_point, is_infinity

__all__ = ["triple_ratio", "cross_ratio", "bk_ratio"]


def triple_ratio(x, y, z) -> float:
    """|y - x| / |z - x| for a triple with x != z."""
    x = as_point(x)
    y = as_point(y)
    z = as_point(z)
    den = float(np.linalg.norm(z - x))
    if den == 0.0:
        raise DegenerateError("triple ratio needs x != z")
    return float(np.linalg.norm(y - x)) / den


def _dist(a: ExtendedPoint, b: ExtendedPoint) -> float:
    return float(np.linalg.norm(as_point(a) - as_point(b)))


def cross_ratio(x, y, z, w) -> float:
    """Cross ratio of an ordered quadruple of distinct extended points."""
    pts = [x, y, z, w]
    inf_slots = [i for i, p in enumerate(pts) if is_infinity(p)]
    if len(inf_slots) > 1:
        raise DegenerateError("quadruple entries must be pairwise distinct")
    finite = [as_point(p) for p in pts if not is_infinity(p)]
    for i in range(len(finite)):
        for j in range(i + 1, len(finite)):
            if np.array_equal(finite[i], finite[j]):
                raise DegenerateError("quadruple entries must be pairwise distinct")
    if not inf_slots:
        num = _dist(x, z) * _dist(y, w)
        den = _dist(x, y) * _dist(z, w)
    else:
        slot = inf_slots[0]
        if slot == 0:
            num, den = _dist(y, w), _dist(z, w)
        elif slot == 1:
            num, den = _dist(x, z), _dist(z, w)
        elif slot == 2:
            num, den = _dist(y, w), _dist(x, y)
        else:
            num, den = _dist(x, z), _dist(x, y)
    if den == 0.0:
        raise DegenerateError("degenerate quadruple: zero denominator")
    return num / den


def bk_ratio(x, y, z, w) -> float:
    """(|x-z| ∧ |y-w|) / (|x-y| ∧ |z-w|) for finite, distinct points."""
    for p in (x, y, z, w):
        if is_infinity(p):
            raise ArgumentError("the Bonk-Kleiner ratio is defined for finite points")
    pts = [as_point(p) for p in (x, y, z, w)]
    for i in range(4):
        for j in range(i + 1, 4):
            if np.array_equal(pts[i], pts[j]):
                raise DegenerateError("quadruple entries must be pairwise distinct")
    x, y, z, w = pts
    num = min(float(np.linalg.norm(x - z)), float(np.linalg.norm(y - w)))
    den = min(float(np.linalg.norm(x - y)), float(np.linalg.norm(z - w)))
    return num / den
