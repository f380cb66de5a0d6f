"""Monotone control functions on [0, inf) and their algebra.

Control functions are strictly increasing homeomorphisms of [0, inf)
fixing 0.  They are closed under composition, inversion (exact where a
closed form exists, monotone bisection otherwise), and the reciprocal
conjugation dual(f): t -> 1 / f^{-1}(1/t) that converts a control bound
between comparison ratios into one between their reciprocals.

The derived constructors at the bottom implement the quantitative bridge
between quasimobius and quasisymmetric control:

* ``theta_from_eta(eta)``   : t -> 1 / theta0_inv(1 / eta(theta0(t)))
* ``theta_prime(theta)``    : t -> theta0(theta(1 / theta0_inv(1/t)))
* ``eta_from_theta_lambda`` : t -> 3 lam * theta_prime(theta)(3 lam t)
* ``lambda_from_eta(eta)``  : max(6, 2 eta(2), 2 / eta_inv(1/6))

with theta0(t) = 3 (t ∨ sqrt t).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from .errors import ArgumentError, RangeError

__all__ = [
    "ControlFunction",
    "LinearScale",
    "PowerQS",
    "Theta0",
    "TableCF",
    "Composed",
    "NumericInverse",
    "Dual",
    "IDENTITY",
    "THETA0",
    "cf_eval",
    "cf_compose",
    "cf_inverse",
    "dual",
    "lambda_from_eta",
    "theta_prime",
    "eta_from_theta_lambda",
    "theta_from_eta",
    "control_from_record",
]

Scalar = Union[float, np.ndarray]


def _prepare(t) -> Tuple[np.ndarray, bool]:
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0.0) or np.any(np.isnan(arr)):
        raise ArgumentError("control functions are defined for t >= 0")
    return arr, arr.ndim == 0


def _finish(arr: np.ndarray, scalar: bool) -> Scalar:
    return float(arr) if scalar else arr


class ControlFunction:
    def __call__(self, t: Scalar) -> Scalar:
        arr, scalar = _prepare(t)
        return _finish(self._eval(arr), scalar)

    def _eval(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def inverse(self) -> "ControlFunction":
        """Exact inverse when available, numeric bisection otherwise."""
        exact = self._exact_inverse()
        return exact if exact is not None else NumericInverse(self)

    def _exact_inverse(self):
        return None

    def to_record(self) -> dict:
        raise NotImplementedError

    def __eq__(self, other):
        return (isinstance(other, ControlFunction)
                and self.to_record() == other.to_record())

    def __hash__(self):
        return hash(repr(self.to_record()))


@dataclass(frozen=True, eq=False)
class LinearScale(ControlFunction):
    """t -> L t."""

    L: float

    def __post_init__(self):
        if self.L <= 0:
            raise ArgumentError("L must be positive")

    def _eval(self, t):
        return self.L * t

    def _exact_inverse(self):
        return LinearScale(1.0 / self.L)

    def to_record(self):
        return {"kind": "linear_scale", "L": self.L}


@dataclass(frozen=True, eq=False)
class PowerQS(ControlFunction):
    """Power-type control t -> M (t**(1/alpha) ∨ t**alpha), alpha >= 1."""

    M: float
    alpha: float

    def __post_init__(self):
        if self.M <= 0 or self.alpha < 1:
            raise ArgumentError("need M > 0 and alpha >= 1")

    def _eval(self, t):
        with np.errstate(divide="ignore"):
            lo = np.where(t > 0, t ** (1.0 / self.alpha), 0.0)
        return self.M * np.where(t <= 1.0, lo, t ** self.alpha)

    def _exact_inverse(self):
        return _PowerQSInverse(self.M, self.alpha)

    def to_record(self):
        return {"kind": "power_qs", "M": self.M, "alpha": self.alpha}


@dataclass(frozen=True, eq=False)
class _PowerQSInverse(ControlFunction):
    M: float
    alpha: float

    def _eval(self, t):
        u = t / self.M
        return np.where(u <= 1.0, u ** self.alpha, u ** (1.0 / self.alpha))

    def _exact_inverse(self):
        return PowerQS(self.M, self.alpha)

    def to_record(self):
        return {"kind": "inverse", "of": PowerQS(self.M, self.alpha).to_record()}


@dataclass(frozen=True, eq=False)
class Theta0(ControlFunction):
    """t -> 3 (t ∨ sqrt t)."""

    def _eval(self, t):
        return 3.0 * np.maximum(t, np.sqrt(t))

    def _exact_inverse(self):
        return _Theta0Inverse()

    def to_record(self):
        return {"kind": "theta0"}


@dataclass(frozen=True, eq=False)
class _Theta0Inverse(ControlFunction):
    def _eval(self, t):
        u = t / 3.0
        return np.where(u <= 1.0, u * u, u)

    def _exact_inverse(self):
        return Theta0()

    def to_record(self):
        return {"kind": "inverse", "of": {"kind": "theta0"}}


@dataclass(frozen=True, eq=False)
class TableCF(ControlFunction):
    """Piecewise power-law interpolation (linear in log-log) of samples."""

    t: np.ndarray
    v: np.ndarray

    def __init__(self, t, v):
        t = np.asarray(t, dtype=float)
        v = np.asarray(v, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or len(t) < 2:
            raise ArgumentError("need matching 1-D sample arrays of length >= 2")
        if np.any(t <= 0) or np.any(v <= 0):
            raise ArgumentError("table samples must be positive")
        if np.any(np.diff(t) <= 0) or np.any(np.diff(v) <= 0):
            raise ArgumentError("table samples must be strictly increasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "v", v)

    def _eval(self, t):
        lt = np.log(self.t)
        lv = np.log(self.v)
        out = np.zeros_like(t)
        pos = t > 0
        x = np.log(t[pos])
        # interp with power-law extension beyond both ends
        y = np.interp(x, lt, lv)
        s_lo = (lv[1] - lv[0]) / (lt[1] - lt[0])
        s_hi = (lv[-1] - lv[-2]) / (lt[-1] - lt[-2])
        y = np.where(x < lt[0], lv[0] + s_lo * (x - lt[0]), y)
        y = np.where(x > lt[-1], lv[-1] + s_hi * (x - lt[-1]), y)
        out[pos] = np.exp(y)
        return out

    def to_record(self):
        return {"kind": "table", "t": self.t.tolist(), "v": self.v.tolist()}


@dataclass(frozen=True, eq=False)
class Composed(ControlFunction):
    """Composition evaluated right to left: parts[0](parts[1](...(t)))."""

    parts: Tuple[ControlFunction, ...]

    def __init__(self, parts: Sequence[ControlFunction]):
        parts = tuple(parts)
        if not parts:
            raise ArgumentError("composition needs at least one part")
        object.__setattr__(self, "parts", parts)

    def _eval(self, t):
        for f in reversed(self.parts):
            t = f._eval(t)
        return t

    def _exact_inverse(self):
        invs = []
        for f in self.parts:
            ex = f._exact_inverse()
            if ex is None:
                return None
            invs.append(ex)
        return Composed(tuple(reversed(invs)))

    def to_record(self):
        return {"kind": "composed", "parts": [f.to_record() for f in self.parts]}


@dataclass(frozen=True, eq=False)
class NumericInverse(ControlFunction):
    """Monotone bisection inverse; tolerance 1e-10 (relative above t = 1)."""

    of: ControlFunction

    def _eval(self, t):
        flat = np.atleast_1d(t)
        out = np.array([self._invert_one(float(y)) for y in flat])
        return out.reshape(t.shape)

    def _invert_one(self, y: float) -> float:
        if y == 0.0:
            return 0.0
        f = self.of
        hi = 1.0
        while f(hi) < y:
            hi *= 4.0
            if hi > 1e30:
                raise RangeError(f"could not bracket inverse of {y}")
        lo = 0.0
        for _ in range(200):
            if hi - lo <= 1e-10 * max(1.0, lo):
                break
            mid = 0.5 * (lo + hi)
            if f(mid) < y:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def _exact_inverse(self):
        return self.of

    def to_record(self):
        return {"kind": "inverse", "of": self.of.to_record()}


@dataclass(frozen=True, eq=False)
class Dual(ControlFunction):
    """Reciprocal conjugation t -> 1 / f^{-1}(1/t)."""

    of: ControlFunction

    def _eval(self, t):
        inv = self.of.inverse()
        out = np.zeros_like(t)
        pos = t > 0
        out[pos] = 1.0 / np.atleast_1d(inv(1.0 / t[pos]))
        return out

    def _exact_inverse(self):
        ex = self.of._exact_inverse()
        if ex is None:
            return None
        return Dual(ex)

    def to_record(self):
        return {"kind": "dual", "of": self.of.to_record()}


IDENTITY = LinearScale(1.0)
THETA0 = Theta0()


def cf_eval(f: ControlFunction, t: Scalar) -> Scalar:
    return f(t)


def cf_compose(f: ControlFunction, g: ControlFunction) -> ControlFunction:
    """f after g."""
    return Composed((f, g))


def cf_inverse(f: ControlFunction) -> ControlFunction:
    return f.inverse()


def dual(f: ControlFunction) -> ControlFunction:
    return Dual(f)


def lambda_from_eta(eta: ControlFunction) -> float:
    """Three-point constant max(6, 2 eta(2), 2 / eta^{-1}(1/6))."""
    return max(6.0, 2.0 * eta(2.0), 2.0 / eta.inverse()(1.0 / 6.0))


def theta_prime(theta: ControlFunction) -> ControlFunction:
    """theta0 ∘ theta ∘ dual(theta0)."""
    return Composed((THETA0, theta, Dual(THETA0)))


def eta_from_theta_lambda(theta: ControlFunction, lam: float) -> ControlFunction:
    """Quasisymmetry control t -> 3 lam * theta_prime(theta)(3 lam t)."""
    if lam < 1.0:
        raise ArgumentError("lam must be >= 1")
    scale = LinearScale(3.0 * lam)
    return Composed((scale, theta_prime(theta), scale))


def theta_from_eta(eta: ControlFunction) -> ControlFunction:
    """Quasimobius control t -> 1 / theta0_inv(1 / eta(theta0(t)))."""
    return Composed((Dual(THETA0), eta, THETA0))


def control_from_record(record: dict) -> ControlFunction:
    """Rebuild a control function from its ``to_record`` dictionary."""
    try:
        kind = record["kind"]
    except (KeyError, TypeError):
        raise ArgumentError(f"control record needs a 'kind' field: {record!r}")
    if kind == "linear_scale":
        return LinearScale(record["L"])
    if kind == "power_qs":
        return PowerQS(record["M"], record["alpha"])
    if kind == "theta0":
        return Theta0()
    if kind == "table":
        return TableCF(record["t"], record["v"])
    if kind == "composed":
        return Composed([control_from_record(r) for r in record["parts"]])
    if kind == "inverse":
        return control_from_record(record["of"]).inverse()
    if kind == "dual":
        return Dual(control_from_record(record["of"]))
    raise ArgumentError(f"unknown control kind {kind!r}")
