"""Points in R^2/R^3, the one-point extension, and point-set utilities.

Finite points are plain float64 numpy arrays of shape (n,) with n in {2, 3};
point collections are arrays of shape (m, n).  The point at infinity of the
one-point extension is the module-level singleton ``INFINITY``.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import ArgumentError

__all__ = [
    "INFINITY",
    "Infinity",
    "ExtendedPoint",
    "as_point",
    "as_points",
    "is_infinity",
    "diameter",
    "separated_third_point",
    "circle_points",
    "square_boundary_points",
    "annulus_points",
    "line_points",
    "points_to_csv",
    "points_from_csv",
]


class Infinity:
    """The added point of the one-point extension; equal only to itself."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("qhlab.INFINITY")


INFINITY = Infinity()

ExtendedPoint = Union[np.ndarray, Infinity]


def is_infinity(x) -> bool:
    return isinstance(x, Infinity)


def as_point(x) -> np.ndarray:
    """Coerce to a finite point array of shape (n,), n in {2, 3}."""
    if is_infinity(x):
        raise ArgumentError("expected a finite point, got INFINITY")
    p = np.asarray(x, dtype=float)
    if p.ndim != 1 or p.shape[0] not in (2, 3):
        raise ArgumentError(f"point must have shape (2,) or (3,), got {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ArgumentError(f"point coordinates must be finite, got {p}")
    return p


def as_points(xs) -> np.ndarray:
    """Coerce to a point array of shape (m, n), m >= 1."""
    arr = np.asarray(xs, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] not in (2, 3):
        raise ArgumentError(f"points must have shape (m, 2) or (m, 3), got {arr.shape}")
    if arr.shape[0] == 0:
        raise ArgumentError("empty point list")
    if not np.all(np.isfinite(arr)):
        raise ArgumentError("point coordinates must be finite")
    return arr


def _pairwise_diameter(X: np.ndarray) -> float:
    best = 0.0
    step = 2048
    for i in range(0, len(X), step):
        block = X[i : i + step]
        d2 = np.sum((block[:, None, :] - X[None, i:, :]) ** 2, axis=-1)
        m = float(d2.max()) if d2.size else 0.0
        best = max(best, m)
    return float(np.sqrt(best))


def diameter(points) -> float:
    """Largest pairwise Euclidean distance of a nonempty point set.

    Exact (up to float rounding); large sets are reduced to their convex
    hull vertices first, with a degenerate-rank fallback.
    """
    X = as_points(points)
    if len(X) == 1:
        return 0.0
    if len(X) <= 2048:
        return _pairwise_diameter(X)
    try:
        hull = ConvexHull(X)
        return _pairwise_diameter(X[hull.vertices])
    except QhullError:
        # Affinely degenerate set: project onto its principal subspace.
        c = X.mean(axis=0)
        Y = X - c
        _, s, vt = np.linalg.svd(Y, full_matrices=False)
        keep = s > s[0] * 1e-12 if s[0] > 0 else s > -1.0
        Z = Y @ vt[keep].T
        if Z.shape[1] <= 1:
            z = Z[:, 0] if Z.shape[1] == 1 else np.zeros(len(Z))
            return float(z.max() - z.min())
        hull = ConvexHull(Z)
        return _pairwise_diameter(X[hull.vertices])


def separated_third_point(boundary, z1, z2) -> np.ndarray:
    """Point of the sample farthest (in the min sense) from both z1 and z2.

    Returns the sample point z3 maximizing min(|z3 - z1|, |z3 - z2|).  The
    caller is responsible for checking the separation bound it needs
    (typically diam/6).
    """
    B = as_points(boundary)
    z1 = as_point(z1)
    z2 = as_point(z2)
    if len(B) < 3:
        raise ArgumentError("need at least 3 boundary points")
    if np.array_equal(z1, z2):
        raise ArgumentError("z1 and z2 must be distinct")
    scale = max(diameter(np.vstack([B, z1[None], z2[None]])), 1.0)
    tol = 1e-9 * scale
    if (np.linalg.norm(B - z1, axis=1).min() > tol
            or np.linalg.norm(B - z2, axis=1).min() > tol):
        raise ArgumentError("z1 and z2 must belong to the boundary sample")
    d1 = np.linalg.norm(B - z1, axis=1)
    d2 = np.linalg.norm(B - z2, axis=1)
    idx = int(np.argmin(-np.minimum(d1, d2)))
    return B[idx].copy()


def circle_points(n: int, radius: float = 1.0, center=(0.0, 0.0),
                  angle0: float = 0.0) -> np.ndarray:
    """n equally spaced points on a circle."""
    if n < 1:
        raise ArgumentError("n must be >= 1")
    t = angle0 + 2.0 * np.pi * np.arange(n) / n
    c = as_point(center)
    return np.column_stack([c[0] + radius * np.cos(t), c[1] + radius * np.sin(t)])


def square_boundary_points(n: int, lo=(0.0, 0.0), hi=(1.0, 1.0)) -> np.ndarray:
    """n points evenly spaced along the perimeter of an axis-aligned rectangle."""
    if n < 4:
        raise ArgumentError("n must be >= 4")
    lo = as_point(lo)
    hi = as_point(hi)
    w, h = hi[0] - lo[0], hi[1] - lo[1]
    per = 2.0 * (w + h)
    s = per * np.arange(n) / n
    pts = np.empty((n, 2))
    for i, si in enumerate(s):
        if si < w:
            pts[i] = (lo[0] + si, lo[1])
        elif si < w + h:
            pts[i] = (hi[0], lo[1] + (si - w))
        elif si < 2 * w + h:
            pts[i] = (hi[0] - (si - w - h), hi[1])
        else:
            pts[i] = (lo[0], hi[1] - (si - 2 * w - h))
    return pts


def annulus_points(n_radial: int, n_angular: int, r_inner: float,
                   r_outer: float, center=(0.0, 0.0),
                   spacing: str = "linear") -> np.ndarray:
    """Polar grid on an annulus; ``spacing`` is 'linear' or 'log' in radius."""
    if not 0 < r_inner < r_outer:
        raise ArgumentError("need 0 < r_inner < r_outer")
    if spacing == "log":
        radii = np.geomspace(r_inner, r_outer, n_radial)
    elif spacing == "linear":
        radii = np.linspace(r_inner, r_outer, n_radial)
    else:
        raise ArgumentError(f"unknown spacing {spacing!r}")
    angles = 2.0 * np.pi * np.arange(n_angular) / n_angular
    c = as_point(center)
    rr, tt = np.meshgrid(radii, angles, indexing="ij")
    return np.column_stack([
        c[0] + (rr * np.cos(tt)).ravel(),
        c[1] + (rr * np.sin(tt)).ravel(),
    ])


def line_points(n: int, a, b) -> np.ndarray:
    """n points evenly spaced on the segment [a, b], endpoints included."""
    a = as_point(a)
    b = as_point(b)
    t = np.linspace(0.0, 1.0, n)
    return a[None, :] + t[:, None] * (b - a)[None, :]


def points_to_csv(path, points) -> None:
    """Write a point list as CSV with header ``x,y`` or ``x,y,z``."""
    X = as_points(points)
    header = "x,y" if X.shape[1] == 2 else "x,y,z"
    np.savetxt(path, X, delimiter=",", header=header, comments="",
               fmt="%.17g")


def points_from_csv(path) -> np.ndarray:
    """Read a point list written by :func:`points_to_csv`."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
    if header not in ("x,y", "x,y,z"):
        raise ArgumentError(f"unexpected CSV header {header!r}")
    X = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return as_points(X)
