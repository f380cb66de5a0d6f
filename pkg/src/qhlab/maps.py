"""Explicit maps of the extended plane/space, closed under composition.

All maps act on finite numpy points and on INFINITY.  ``apply`` is
extended-aware and never crashes at a pole (it returns INFINITY);
``apply_many`` is the vectorized finite-only fast path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import ArgumentError, DegenerateError
from .geometry import INFINITY, ExtendedPoint, as_point, as_points, is_infinity

__all__ = [
    "Map",
    "Identity",
    "Similarity",
    "RadialPower",
    "Inversion",
    "MobiusPlane",
    "Composition",
    "map_from_record",
]


class Map:
    def apply(self, x: ExtendedPoint) -> ExtendedPoint:
        raise NotImplementedError

    def apply_many(self, X) -> np.ndarray:
        """Vectorized image of finite points; raises if a pole is hit."""
        raise NotImplementedError

    def to_record(self) -> dict:
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, Map) and self.to_record() == other.to_record()

    def __hash__(self):
        return hash(repr(self.to_record()))


@dataclass(frozen=True, eq=False)
class Identity(Map):
    def apply(self, x):
        return x if is_infinity(x) else as_point(x)

    def apply_many(self, X):
        return as_points(X).copy()

    def to_record(self):
        return {"kind": "identity"}


@dataclass(frozen=True, eq=False)
class Similarity(Map):
    """x -> scale * R x + translation with R orthogonal."""

    scale: float
    rotation: Optional[np.ndarray] = None
    translation: Optional[np.ndarray] = None

    def __init__(self, scale=1.0, rotation=None, translation=None, angle=None):
        object.__setattr__(self, "scale", float(scale))
        if self.scale <= 0:
            raise ArgumentError("scale must be positive")
        if angle is not None:
            if rotation is not None:
                raise ArgumentError("give either rotation or angle, not both")
            c, s = math.cos(angle), math.sin(angle)
            rotation = np.array([[c, -s], [s, c]])
        if rotation is not None:
            rotation = np.asarray(rotation, float)
            if not np.allclose(rotation @ rotation.T, np.eye(len(rotation)), atol=1e-10):
                raise ArgumentError("rotation must be orthogonal")
        object.__setattr__(self, "rotation", rotation)
        if translation is not None:
            translation = as_point(translation)
        object.__setattr__(self, "translation", translation)

    def apply(self, x):
        if is_infinity(x):
            return INFINITY
        return self.apply_many(as_point(x)[None, :])[0]

    def apply_many(self, X):
        X = as_points(X)
        Y = X * self.scale
        if self.rotation is not None:
            Y = Y @ self.rotation.T
        if self.translation is not None:
            Y = Y + self.translation[None, :]
        return Y

    def to_record(self):
        rec = {"kind": "similarity", "scale": self.scale}
        if self.rotation is not None:
            rec["rotation"] = self.rotation.tolist()
        if self.translation is not None:
            rec["translation"] = self.translation.tolist()
        return rec


@dataclass(frozen=True, eq=False)
class RadialPower(Map):
    """x -> |x|**(alpha-1) * x, fixing the origin and infinity."""

    alpha: float

    def __init__(self, alpha):
        object.__setattr__(self, "alpha", float(alpha))
        if self.alpha <= 0:
            raise ArgumentError("alpha must be positive")

    def apply(self, x):
        if is_infinity(x):
            return INFINITY
        return self.apply_many(as_point(x)[None, :])[0]

    def apply_many(self, X):
        X = as_points(X)
        r = np.linalg.norm(X, axis=1)
        fac = np.zeros_like(r)
        nz = r > 0
        fac[nz] = r[nz] ** (self.alpha - 1.0)
        return X * fac[:, None]

    def to_record(self):
        return {"kind": "radial_power", "alpha": self.alpha}


@dataclass(frozen=True, eq=False)
class Inversion(Map):
    """u(x) = c + (x - c)/|x - c|^2, swapping the center and infinity."""

    center: np.ndarray

    def __init__(self, center=(0.0, 0.0)):
        object.__setattr__(self, "center", as_point(center))

    def apply(self, x):
        if is_infinity(x):
            return self.center.copy()
        p = as_point(x)
        if np.array_equal(p, self.center):
            return INFINITY
        return self.apply_many(p[None, :])[0]

    def apply_many(self, X):
        X = as_points(X)
        V = X - self.center[None, :]
        r2 = np.sum(V * V, axis=1)
        if np.any(r2 == 0.0):
            raise DegenerateError("inversion center hit; use apply() for the "
                                  "extended convention")
        return self.center[None, :] + V / r2[:, None]

    def to_record(self):
        return {"kind": "inversion", "center": self.center.tolist()}


@dataclass(frozen=True, eq=False)
class MobiusPlane(Map):
    """z -> (a z + b)/(c z + d) on the extended plane (2D only)."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __init__(self, a, b, c, d):
        a, b, c, d = complex(a), complex(b), complex(c), complex(d)
        if a * d - b * c == 0:
            raise ArgumentError("ad - bc must be nonzero")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @staticmethod
    def _to_complex(X: np.ndarray) -> np.ndarray:
        if X.shape[1] != 2:
            raise ArgumentError("MobiusPlane acts on R^2 only")
        return X[:, 0] + 1j * X[:, 1]

    def apply(self, x):
        if is_infinity(x):
            if self.c == 0:
                return INFINITY
            w = self.a / self.c
            return np.array([w.real, w.imag])
        p = as_point(x)
        z = complex(p[0], p[1])
        den = self.c * z + self.d
        if den == 0:
            return INFINITY
        w = (self.a * z + self.b) / den
        return np.array([w.real, w.imag])

    def apply_many(self, X):
        X = as_points(X)
        z = self._to_complex(X)
        den = self.c * z + self.d
        if np.any(den == 0):
            raise DegenerateError("Mobius pole hit; use apply() for the "
                                  "extended convention")
        w = (self.a * z + self.b) / den
        return np.column_stack([w.real, w.imag])

    def to_record(self):
        return {"kind": "mobius_plane",
                "a": [self.a.real, self.a.imag], "b": [self.b.real, self.b.imag],
                "c": [self.c.real, self.c.imag], "d": [self.d.real, self.d.imag]}


@dataclass(frozen=True, eq=False)
class Composition(Map):
    """Apply the listed maps left to right (maps[0] first)."""

    maps: Tuple[Map, ...]

    def __init__(self, maps: Sequence[Map]):
        maps = tuple(maps)
        if not maps:
            raise ArgumentError("composition needs at least one map")
        if not all(isinstance(m, Map) for m in maps):
            raise ArgumentError("composition members must be maps")
        object.__setattr__(self, "maps", maps)

    def apply(self, x):
        for m in self.maps:
            x = m.apply(x)
        return x

    def apply_many(self, X):
        Y = as_points(X)
        for m in self.maps:
            Y = m.apply_many(Y)
        return Y

    def to_record(self):
        return {"kind": "composition", "maps": [m.to_record() for m in self.maps]}


def map_from_record(record: dict) -> Map:
    """Rebuild a map from its ``to_record`` dictionary."""
    try:
        kind = record["kind"]
    except (KeyError, TypeError):
        raise ArgumentError(f"map record needs a 'kind' field: {record!r}")
    if kind == "identity":
        _reject_extra(record, {"kind"})
        return Identity()
    if kind == "similarity":
        _reject_extra(record, {"kind", "scale", "rotation", "translation"})
        return Similarity(record.get("scale", 1.0),
                          rotation=record.get("rotation"),
                          translation=record.get("translation"))
    if kind == "radial_power":
        _reject_extra(record, {"kind", "alpha"})
        return RadialPower(record["alpha"])
    if kind == "inversion":
        _reject_extra(record, {"kind", "center"})
        return Inversion(record.get("center", (0.0, 0.0)))
    if kind == "mobius_plane":
        _reject_extra(record, {"kind", "a", "b", "c", "d"})
        vals = {}
        for name in "abcd":
            v = record[name]
            vals[name] = complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v)
        return MobiusPlane(**vals)
    if kind == "composition":
        _reject_extra(record, {"kind", "maps"})
        return Composition([map_from_record(r) for r in record["maps"]])
    raise ArgumentError(f"unknown map kind {kind!r}")


def _reject_extra(record: dict, allowed: set) -> None:
    extra = set(record) - allowed
    if extra:
        raise ArgumentError(f"unknown map fields {sorted(extra)}")
