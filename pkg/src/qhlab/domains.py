"""Analytic domains with exact distance-to-boundary oracles.

Every domain knows its boundary exactly: ``boundary_distance`` is a closed
form per variant, ``boundary_points`` produces a sample of the boundary at a
requested spacing, and ``contains`` understands the one-point extension
(INFINITY belongs only to BallExterior and ArcComplement).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import ArgumentError, MembershipError
from .geometry import INFINITY, as_point, as_points, circle_points, is_infinity

__all__ = [
    "Domain",
    "HalfPlane",
    "Ball",
    "PuncturedBall",
    "BallExterior",
    "Rectangle",
    "ArcComplement",
    "domain_from_record",
    "random_interior_points",
]

Box = Tuple[np.ndarray, np.ndarray]


class Domain:
    """Common interface of all domain variants."""

    dim: int

    # -- geometry ---------------------------------------------------------

    def _boundary_set_distance(self, X: np.ndarray) -> np.ndarray:
        """Distance from arbitrary finite points (m, n) to the boundary set."""
        raise NotImplementedError

    def _contains_finite(self, X: np.ndarray) -> np.ndarray:
        """Boolean mask: which finite points (m, n) lie in the domain."""
        raise NotImplementedError

    @property
    def contains_infinity(self) -> bool:
        return False

    @property
    def is_bounded(self) -> bool:
        raise NotImplementedError

    def default_box(self) -> Optional[Box]:
        """Sampling box for bounded variants; None if bounds are required."""
        return None

    def boundary_points(self, spacing: float, window: Optional[Box] = None) -> np.ndarray:
        """Boundary sample at spacing <= ``spacing`` (windowed when unbounded)."""
        raise NotImplementedError

    # -- public operations --------------------------------------------------

    def contains(self, x) -> bool:
        if is_infinity(x):
            return self.contains_infinity
        p = as_point(x)
        self._check_dim(p)
        return bool(self._contains_finite(p[None, :])[0])

    def contains_many(self, X) -> np.ndarray:
        X = as_points(X)
        self._check_dim(X[0])
        return self._contains_finite(X)

    def boundary_distance(self, x) -> float:
        p = as_point(x)
        self._check_dim(p)
        if not self._contains_finite(p[None, :])[0]:
            raise MembershipError(f"point {p.tolist()} is not in {self!r}")
        return float(self._boundary_set_distance(p[None, :])[0])

    def boundary_distance_many(self, X, check: bool = True) -> np.ndarray:
        X = as_points(X)
        self._check_dim(X[0])
        if check and not np.all(self._contains_finite(X)):
            bad = X[~self._contains_finite(X)][0]
            raise MembershipError(f"point {bad.tolist()} is not in {self!r}")
        return self._boundary_set_distance(X)

    def _check_dim(self, p: np.ndarray) -> None:
        if p.shape[-1] != self.dim:
            raise ArgumentError(
                f"{type(self).__name__} lives in dimension {self.dim}, "
                f"got a point of dimension {p.shape[-1]}")

    def to_record(self) -> dict:
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, Domain) and self.to_record() == other.to_record()

    def __hash__(self):
        return hash(repr(self.to_record()))


@dataclass(frozen=True, eq=False)
class HalfPlane(Domain):
    """Upper half-space: last coordinate positive."""

    dim: int = 2

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ArgumentError("dim must be 2 or 3")

    def _boundary_set_distance(self, X):
        return np.abs(X[:, -1])

    def _contains_finite(self, X):
        return X[:, -1] > 0.0

    @property
    def is_bounded(self):
        return False

    def boundary_points(self, spacing, window=None):
        if window is None:
            raise ArgumentError("HalfPlane boundary sampling needs a window")
        lo, hi = np.asarray(window[0], float), np.asarray(window[1], float)
        axes = []
        for k in range(self.dim - 1):
            n = max(2, int(math.ceil((hi[k] - lo[k]) / spacing)) + 1)
            axes.append(np.linspace(lo[k], hi[k], n))
        if self.dim == 2:
            return np.column_stack([axes[0], np.zeros_like(axes[0])])
        gx, gy = np.meshgrid(axes[0], axes[1], indexing="ij")
        return np.column_stack([gx.ravel(), gy.ravel(), np.zeros(gx.size)])

    def to_record(self):
        return {"kind": "half_plane", "dim": self.dim}


def _sphere_points(center: np.ndarray, radius: float, spacing: float) -> np.ndarray:
    """Sphere/circle sample at chordal spacing <= spacing."""
    if center.shape[0] == 2:
        n = max(8, int(math.ceil(2.0 * math.pi * radius / spacing)))
        return circle_points(n, radius, center)
    n = max(32, int(math.ceil(15.0 * (radius / spacing) ** 2)))
    k = np.arange(n) + 0.5
    phi = np.arccos(1.0 - 2.0 * k / n)
    golden = math.pi * (3.0 - math.sqrt(5.0))
    theta = golden * k
    return center[None, :] + radius * np.column_stack([
        np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)])


@dataclass(frozen=True, eq=False)
class Ball(Domain):
    center: np.ndarray
    radius: float

    def __init__(self, center, radius):
        object.__setattr__(self, "center", as_point(center))
        object.__setattr__(self, "radius", float(radius))
        if self.radius <= 0:
            raise ArgumentError("radius must be positive")

    @property
    def dim(self):
        return self.center.shape[0]

    def _r(self, X):
        return np.linalg.norm(X - self.center[None, :], axis=1)

    def _boundary_set_distance(self, X):
        return np.abs(self.radius - self._r(X))

    def _contains_finite(self, X):
        return self._r(X) < self.radius

    @property
    def is_bounded(self):
        return True

    def default_box(self):
        return (self.center - self.radius, self.center + self.radius)

    def boundary_points(self, spacing, window=None):
        return _sphere_points(self.center, self.radius, spacing)

    def to_record(self):
        return {"kind": "ball", "center": self.center.tolist(), "radius": self.radius}


@dataclass(frozen=True, eq=False)
class PuncturedBall(Domain):
    """Open ball with its center removed; the center is a boundary point."""

    center: np.ndarray
    radius: float

    def __init__(self, center, radius):
        object.__setattr__(self, "center", as_point(center))
        object.__setattr__(self, "radius", float(radius))
        if self.radius <= 0:
            raise ArgumentError("radius must be positive")

    @property
    def dim(self):
        return self.center.shape[0]

    def _r(self, X):
        return np.linalg.norm(X - self.center[None, :], axis=1)

    def _boundary_set_distance(self, X):
        r = self._r(X)
        return np.minimum(r, np.abs(self.radius - r))

    def _contains_finite(self, X):
        r = self._r(X)
        return (r > 0.0) & (r < self.radius)

    @property
    def is_bounded(self):
        return True

    def default_box(self):
        return (self.center - self.radius, self.center + self.radius)

    def boundary_points(self, spacing, window=None):
        sphere = _sphere_points(self.center, self.radius, spacing)
        return np.vstack([sphere, self.center[None, :]])

    def to_record(self):
        return {"kind": "punctured_ball", "center": self.center.tolist(),
                "radius": self.radius}


@dataclass(frozen=True, eq=False)
class BallExterior(Domain):
    """Complement of a closed ball, including the point at infinity."""

    center: np.ndarray
    radius: float

    def __init__(self, center, radius):
        object.__setattr__(self, "center", as_point(center))
        object.__setattr__(self, "radius", float(radius))
        if self.radius <= 0:
            raise ArgumentError("radius must be positive")

    @property
    def dim(self):
        return self.center.shape[0]

    def _r(self, X):
        return np.linalg.norm(X - self.center[None, :], axis=1)

    def _boundary_set_distance(self, X):
        return np.abs(self._r(X) - self.radius)

    def _contains_finite(self, X):
        return self._r(X) > self.radius

    @property
    def contains_infinity(self):
        return True

    @property
    def is_bounded(self):
        return False

    def boundary_points(self, spacing, window=None):
        return _sphere_points(self.center, self.radius, spacing)

    def to_record(self):
        return {"kind": "ball_exterior", "center": self.center.tolist(),
                "radius": self.radius}


@dataclass(frozen=True, eq=False)
class Rectangle(Domain):
    lo: np.ndarray
    hi: np.ndarray

    def __init__(self, lo, hi):
        object.__setattr__(self, "lo", as_point(lo))
        object.__setattr__(self, "hi", as_point(hi))
        if self.lo.shape != self.hi.shape:
            raise ArgumentError("corner dimensions differ")
        if not np.all(self.lo < self.hi):
            raise ArgumentError("corners must be strictly ordered componentwise")

    @property
    def dim(self):
        return self.lo.shape[0]

    def _boundary_set_distance(self, X):
        inside_margin = np.minimum(X - self.lo[None, :], self.hi[None, :] - X).min(axis=1)
        outside = np.linalg.norm(
            np.maximum(np.maximum(self.lo[None, :] - X, X - self.hi[None, :]), 0.0),
            axis=1)
        return np.where(inside_margin > 0.0, np.maximum(inside_margin, 0.0), outside)

    def _contains_finite(self, X):
        return np.all((X > self.lo[None, :]) & (X < self.hi[None, :]), axis=1)

    @property
    def is_bounded(self):
        return True

    def default_box(self):
        return (self.lo.copy(), self.hi.copy())

    def boundary_points(self, spacing, window=None):
        if self.dim == 2:
            (x0, y0), (x1, y1) = self.lo, self.hi
            nx = max(2, int(math.ceil((x1 - x0) / spacing)) + 1)
            ny = max(2, int(math.ceil((y1 - y0) / spacing)) + 1)
            xs = np.linspace(x0, x1, nx)
            ys = np.linspace(y0, y1, ny)
            edges = [
                np.column_stack([xs, np.full(nx, y0)]),
                np.column_stack([xs, np.full(nx, y1)]),
                np.column_stack([np.full(ny, x0), ys]),
                np.column_stack([np.full(ny, x1), ys]),
            ]
            pts = np.vstack(edges)
            return np.unique(pts, axis=0)
        # 3D: sample the six faces on grids of the requested spacing.
        axes = [np.linspace(self.lo[k], self.hi[k],
                            max(2, int(math.ceil((self.hi[k] - self.lo[k]) / spacing)) + 1))
                for k in range(3)]
        faces = []
        for k in range(3):
            u, v = [a for i, a in enumerate(axes) if i != k]
            gu, gv = np.meshgrid(u, v, indexing="ij")
            for val in (self.lo[k], self.hi[k]):
                face = np.empty((gu.size, 3))
                cols = [i for i in range(3) if i != k]
                face[:, cols[0]] = gu.ravel()
                face[:, cols[1]] = gv.ravel()
                face[:, k] = val
                faces.append(face)
        return np.unique(np.vstack(faces), axis=0)

    def to_record(self):
        return {"kind": "rectangle", "lo": self.lo.tolist(), "hi": self.hi.tolist()}


@dataclass(frozen=True, eq=False)
class ArcComplement(Domain):
    """Extended plane minus a closed arc of the unit circle (2D only).

    The arc is {exp(it) : angle_lo <= t <= angle_hi} with a span in (0, 2*pi].
    """

    angle_lo: float
    angle_hi: float

    def __init__(self, angle_lo, angle_hi):
        object.__setattr__(self, "angle_lo", float(angle_lo))
        object.__setattr__(self, "angle_hi", float(angle_hi))
        span = self.angle_hi - self.angle_lo
        if not 0.0 < span <= 2.0 * math.pi:
            raise ArgumentError("arc span must lie in (0, 2*pi]")

    dim = 2

    def _arc_endpoints(self) -> np.ndarray:
        return np.array([
            [math.cos(self.angle_lo), math.sin(self.angle_lo)],
            [math.cos(self.angle_hi), math.sin(self.angle_hi)],
        ])

    def _boundary_set_distance(self, X):
        r = np.linalg.norm(X, axis=1)
        phi = np.arctan2(X[:, 1], X[:, 0])
        rel = np.mod(phi - self.angle_lo, 2.0 * math.pi)
        on_arc_ray = rel <= (self.angle_hi - self.angle_lo)
        radial = np.abs(r - 1.0)
        ends = self._arc_endpoints()
        d_ends = np.minimum(
            np.linalg.norm(X - ends[0][None, :], axis=1),
            np.linalg.norm(X - ends[1][None, :], axis=1))
        return np.where(on_arc_ray, radial, d_ends)

    def _contains_finite(self, X):
        return self._boundary_set_distance(X) > 0.0

    @property
    def contains_infinity(self):
        return True

    @property
    def is_bounded(self):
        return False

    def boundary_points(self, spacing, window=None):
        span = self.angle_hi - self.angle_lo
        n = max(3, int(math.ceil(span / spacing)) + 1)
        t = np.linspace(self.angle_lo, self.angle_hi, n)
        return np.column_stack([np.cos(t), np.sin(t)])

    def to_record(self):
        return {"kind": "arc_complement", "angle_lo": self.angle_lo,
                "angle_hi": self.angle_hi}


_KINDS = {
    "half_plane": lambda r: HalfPlane(dim=int(r.get("dim", 2))),
    "ball": lambda r: Ball(r["center"], r["radius"]),
    "punctured_ball": lambda r: PuncturedBall(r["center"], r["radius"]),
    "ball_exterior": lambda r: BallExterior(r["center"], r["radius"]),
    "rectangle": lambda r: Rectangle(r["lo"], r["hi"]),
    "arc_complement": lambda r: ArcComplement(r["angle_lo"], r["angle_hi"]),
}


def domain_from_record(record: dict) -> Domain:
    """Rebuild a domain from its ``to_record`` dictionary."""
    try:
        kind = record["kind"]
    except (KeyError, TypeError):
        raise ArgumentError(f"domain record needs a 'kind' field: {record!r}")
    if kind not in _KINDS:
        raise ArgumentError(f"unknown domain kind {kind!r}")
    known = {"kind", "dim", "center", "radius", "lo", "hi", "angle_lo", "angle_hi"}
    extra = set(record) - known
    if extra:
        raise ArgumentError(f"unknown domain fields {sorted(extra)}")
    return _KINDS[kind](record)


def random_interior_points(domain: Domain, n: int, rng: np.random.Generator,
                           box: Optional[Box] = None,
                           min_boundary_distance: float = 0.0) -> np.ndarray:
    """Rejection-sample n interior points, uniform on box * domain."""
    if box is None:
        box = domain.default_box()
        if box is None:
            raise ArgumentError(f"{type(domain).__name__} needs an explicit box")
    lo = np.asarray(box[0], float)
    hi = np.asarray(box[1], float)
    out = []
    got = 0
    for _ in range(1000):
        m = max(4 * (n - got), 256)
        cand = rng.uniform(lo, hi, size=(m, lo.shape[0]))
        ok = domain.contains_many(cand)
        if min_boundary_distance > 0.0:
            d = domain._boundary_set_distance(cand)
            ok &= d >= min_boundary_distance
        cand = cand[ok]
        out.append(cand)
        got += len(cand)
        if got >= n:
            break
    X = np.vstack(out) if out else np.empty((0, lo.shape[0]))
    if len(X) < n:
        raise ArgumentError("rejection sampling failed; box barely meets domain")
    return X[:n]
