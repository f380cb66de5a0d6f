"""Metrics on domains: distance-ratio, quasihyperbolic, and visual.

The quasihyperbolic metric is approximated by shortest paths on a sampled
net.  An edge (a, b) carries the weight log(1 + |a-b| / min(d(a), d(b))):
each edge weight dominates the distance-ratio metric of its endpoints, so
graph path sums dominate j exactly (triangle inequality), and the weight
telescopes exactly along boundary-aligned geodesics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix, bmat, coo_matrix
from scipy.sparse.csgraph import dijkstra, shortest_path

from .domains import Ball, Domain, HalfPlane, PuncturedBall
from .errors import (ArgumentError, MembershipError,
                     UnreachableError, UnsupportedConfigurationError)
from .geometry import as_point, as_points
from .nets import EDGE_FRACTION, SampledDomain

__all__ = [
    "j_distance",
    "qh_exact_aligned",
    "qh_weights",
    "qh_graph",
    "QhDistance",
    "qh_distance",
    "qh_distances_from",
    "qh_table",
    "MetricOracle",
    "gromov_product",
    "gromov_matrix",
    "DeltaReport",
    "delta_estimate",
    "VisualData",
    "visual_data",
]


def j_distance(domain: Domain, x, y) -> float:
    """Distance-ratio metric log(1 + |x-y| / min(d(x), d(y)))."""
    x = as_point(x)
    y = as_point(y)
    dx = domain.boundary_distance(x)
    dy = domain.boundary_distance(y)
    return float(np.log1p(np.linalg.norm(x - y) / min(dx, dy)))


def _aligned_radii(center: np.ndarray, x: np.ndarray, y: np.ndarray,
                   rtol: float = 1e-9) -> Optional[Tuple[float, float]]:
    """Radii (r1 <= r2) if x, y lie on a common ray from center, else None."""
    vx = x - center
    vy = y - center
    rx = float(np.linalg.norm(vx))
    ry = float(np.linalg.norm(vy))
    if rx == 0.0 or ry == 0.0:
        return (min(rx, ry), max(rx, ry))
    cross = rx * ry - float(np.dot(vx, vy))
    if abs(cross) > rtol * rx * ry:
        return None
    return (min(rx, ry), max(rx, ry))


def qh_exact_aligned(domain: Domain, x, y) -> float:
    """Closed-form quasihyperbolic distance for aligned configurations.

    Supported: vertically aligned points of a half-plane, radially aligned
    points of a ball, and radially aligned points of a punctured ball.
    Serves as an independent oracle for the graph approximation.
    """
    x = as_point(x)
    y = as_point(y)
    for p in (x, y):
        if not domain.contains(p):
            raise MembershipError(f"point {p.tolist()} is not in {domain!r}")
    if np.array_equal(x, y):
        return 0.0
    if isinstance(domain, HalfPlane):
        if not np.allclose(x[:-1], y[:-1], rtol=0.0, atol=1e-12):
            raise UnsupportedConfigurationError(
                "half-plane pair must be vertically aligned")
        return abs(float(np.log(y[-1] / x[-1])))
    if isinstance(domain, Ball):
        rr = _aligned_radii(domain.center, x, y)
        if rr is None:
            raise UnsupportedConfigurationError("ball pair must be radially aligned")
        r1, r2 = rr
        R = domain.radius
        return float(np.log((R - r1) / (R - r2)))
    if isinstance(domain, PuncturedBall):
        rr = _aligned_radii(domain.center, x, y)
        if rr is None or rr[0] == 0.0:
            raise UnsupportedConfigurationError(
                "punctured-ball pair must be radially aligned away from the center")
        r1, r2 = rr
        R = domain.radius
        half = R / 2.0
        if r2 <= half:
            return float(np.log(r2 / r1))
        if r1 >= half:
            return float(np.log((R - r1) / (R - r2)))
        return float(np.log(half / r1) + np.log(half / (R - r2)))
    raise UnsupportedConfigurationError(
        f"no aligned closed form for {type(domain).__name__}")


# -- graph quasihyperbolic metric -------------------------------------------


def qh_weights(net: SampledDomain) -> np.ndarray:
    """Quasihyperbolic edge weights log(1 + len / min(d_a, d_b))."""
    da = net.bdist[net.edges[:, 0]]
    db = net.bdist[net.edges[:, 1]]
    return np.log1p(net.edge_lengths / np.minimum(da, db))


def qh_graph(net: SampledDomain) -> csr_matrix:
    return net.graph(qh_weights(net))


@dataclass(frozen=True)
class QhDistance:
    """Graph quasihyperbolic distance with its error-accounting context."""

    value: float
    mesh_h: float
    source_offset: float
    target_offset: float

    def __float__(self):
        return self.value


def _query_attach(net: SampledDomain, x: np.ndarray):
    """Resolve a query point to (node_index, None) or (None, (nbrs, wts))."""
    idx, dist = net.nearest(x)
    scale = max(net.mesh_h, 1.0)
    if dist <= 1e-12 * scale:
        return idx, None, 0.0
    d = float(net.domain.boundary_distance(x))
    lev = int(np.clip(np.ceil(np.log2(max(6.0 * net.mesh_h / d, 1.0))), 0,
                      int(net.levels.max())))
    radius = min(EDGE_FRACTION * d, 3.0 * net.mesh_h / 2.0 ** lev)
    nbrs = np.asarray(net.tree.query_ball_point(x, radius), dtype=np.int64)
    if len(nbrs):
        lens = np.linalg.norm(net.points[nbrs] - x[None, :], axis=1)
        ok = (lens <= EDGE_FRACTION * np.minimum(d, net.bdist[nbrs])) & (lens > 0)
        nbrs, lens = nbrs[ok], lens[ok]
    if len(nbrs) == 0:
        # No admissible virtual edge (query too close to the boundary for
        # its surroundings): snap to the nearest net point.
        return idx, None, dist
    wts = np.log1p(lens / np.minimum(d, net.bdist[nbrs]))
    return None, (nbrs, wts), 0.0


def qh_distance(net: SampledDomain, x, y) -> QhDistance:
    """Shortest-path quasihyperbolic distance between two points.

    Net points are used as graph nodes directly; off-net queries are
    attached as temporary nodes with admissible edges (falling back to a
    snap when no admissible edge exists, with the offset reported).
    """
    x = as_point(x)
    y = as_point(y)
    ix, ax, offx = _query_attach(net, x)
    iy, ay, offy = _query_attach(net, y)
    base = qh_graph(net)
    m = net.n_points
    if ax is None and ay is None:
        if ix == iy:
            return QhDistance(0.0, net.mesh_h, offx, offy)
        dist = dijkstra(base, directed=False, indices=ix)[iy]
        if not np.isfinite(dist):
            raise UnreachableError("endpoints lie in different net components")
        return QhDistance(float(dist), net.mesh_h, offx, offy)

    rows = []
    cols = []
    vals = []
    extra = 0
    if ax is not None:
        src = m + extra
        extra += 1
        nbrs, wts = ax
        rows.extend([src] * len(nbrs))
        cols.extend(nbrs.tolist())
        vals.extend(wts.tolist())
    else:
        src = ix
    if ay is not None:
        dst = m + extra
        extra += 1
        nbrs, wts = ay
        rows.extend([dst] * len(nbrs))
        cols.extend(nbrs.tolist())
        vals.extend(wts.tolist())
    else:
        dst = iy
    if ax is not None and ay is not None:
        dxy = np.linalg.norm(x - y)
        dbx = net.domain.boundary_distance(x)
        dby = net.domain.boundary_distance(y)
        if 0 < dxy <= EDGE_FRACTION * min(dbx, dby):
            rows.append(src)
            cols.append(dst)
            vals.append(float(np.log1p(dxy / min(dbx, dby))))
    n_all = m + extra
    aug = coo_matrix((vals, (rows, cols)), shape=(n_all, n_all)).tocsr()
    full = bmat([[base, None], [None, csr_matrix((extra, extra))]]).tocsr() + aug + aug.T
    dist = dijkstra(full, directed=False, indices=src)[dst]
    if not np.isfinite(dist):
        raise UnreachableError("endpoints lie in different net components")
    return QhDistance(float(dist), net.mesh_h, offx, offy)


def qh_distances_from(net: SampledDomain, source_index: int) -> np.ndarray:
    """Single-source quasihyperbolic distances to every net point."""
    return dijkstra(qh_graph(net), directed=False, indices=int(source_index))


def qh_table(net: SampledDomain, indices: Optional[Sequence[int]] = None) -> np.ndarray:
    """All-pairs quasihyperbolic distance table (n <= 2000)."""
    if indices is None:
        indices = np.arange(net.n_points)
    idx = np.asarray(indices, dtype=np.int64)
    if len(idx) > 2000:
        raise ArgumentError("all-pairs tables are limited to 2000 points")
    D = dijkstra(qh_graph(net), directed=False, indices=idx)[:, idx]
    if not np.all(np.isfinite(D)):
        raise UnreachableError("net decomposes into several components")
    return np.minimum(D, D.T)


# -- generic metric oracle ----------------------------------------------------


class MetricOracle:
    """Finite metric space: a symmetric, nonnegative distance table."""

    def __init__(self, dist: np.ndarray, points: Optional[np.ndarray] = None,
                 mesh_h: Optional[float] = None, validate: bool = True):
        D = np.asarray(dist, dtype=float)
        if D.ndim != 2 or D.shape[0] != D.shape[1]:
            raise ArgumentError("distance table must be square")
        if validate:
            if np.any(np.diag(D) != 0.0):
                raise ArgumentError("distance table diagonal must be zero")
            if np.any(D < 0.0):
                raise ArgumentError("distances must be nonnegative")
            if not np.array_equal(D, D.T):
                raise ArgumentError("distance table must be symmetric")
            self._check_triangle(D)
        self.dist = D
        self.points = None if points is None else as_points(points)
        self.mesh_h = mesh_h
        self.dist.setflags(write=False)

    @staticmethod
    def _check_triangle(D: np.ndarray, tol: float = 1e-9) -> None:
        n = len(D)
        rng = np.random.default_rng(0)
        if n <= 64:
            triples = [(i, j, k) for i in range(n) for j in range(n) for k in range(n)]
            triples = np.array(triples).T if triples else np.empty((3, 0), int)
        else:
            triples = rng.integers(0, n, size=(3, 20000))
        i, j, k = triples
        slack = D[i, j] - (D[i, k] + D[k, j])
        scale = max(float(D.max()), 1.0)
        if slack.size and float(slack.max()) > tol * scale:
            raise ArgumentError("triangle inequality violated beyond tolerance")

    def __len__(self):
        return len(self.dist)

    @classmethod
    def from_points(cls, points, validate: bool = True) -> "MetricOracle":
        X = as_points(points)
        diff = X[:, None, :] - X[None, :, :]
        D = np.sqrt(np.sum(diff * diff, axis=-1))
        D = np.triu(D, 1)
        D = D + D.T
        return cls(D, points=X, validate=validate)

    @classmethod
    def from_net(cls, net: SampledDomain, indices: Optional[Sequence[int]] = None,
                 validate: bool = False) -> "MetricOracle":
        if indices is None:
            indices = np.arange(net.n_points)
        idx = np.asarray(indices, dtype=np.int64)
        D = qh_table(net, idx)
        return cls(D, points=net.points[idx], mesh_h=net.mesh_h,
                   validate=validate)

    def to_csv(self, path) -> None:
        np.savetxt(path, self.dist, delimiter=",", fmt="%.17g")

    @classmethod
    def from_csv(cls, path, validate: bool = True) -> "MetricOracle":
        D = np.loadtxt(path, delimiter=",", ndmin=2)
        return cls(D, validate=validate)


def gromov_product(m: MetricOracle, p: int, x: int, y: int) -> float:
    """(x|y)_p = (d(x,p) + d(y,p) - d(x,y)) / 2."""
    D = m.dist
    return 0.5 * (D[x, p] + D[y, p] - D[x, y])


def gromov_matrix(D: np.ndarray, p: int) -> np.ndarray:
    """All Gromov products with base p: G[i, j] = (i|j)_p."""
    col = D[:, p]
    return 0.5 * (col[:, None] + col[None, :] - D)


@dataclass(frozen=True)
class DeltaReport:
    """Four-point hyperbolicity estimate with its witness quadruple."""

    delta: float
    witness: Tuple[int, int, int, int]
    scanned: int
    budget: int
    seed: int
    exhaustive: bool
    mesh_h: Optional[float] = None

    def to_json_dict(self) -> dict:
        return {"delta": self.delta, "witness": list(self.witness),
                "budget": self.budget, "seed": self.seed,
                "scanned": self.scanned, "exhaustive": self.exhaustive,
                "h": self.mesh_h}


def delta_estimate(m: MetricOracle, budget: int, seed: int) -> DeltaReport:
    """Largest four-point defect over scanned quadruples (x, y, z, p).

    The defect of a quadruple is max(0, min((x|z)_p, (z|y)_p) - (x|y)_p).
    Scans all n**4 quadruples when that fits the budget, otherwise draws
    quadruples uniformly (deterministic for the seed; larger budgets scan
    supersets, so the estimate is monotone in the budget).
    """
    n = len(m)
    if n < 4:
        raise ArgumentError("need at least 4 points")
    if budget < 1:
        raise ArgumentError("budget must be positive")
    D = m.dist
    best = -np.inf
    best_w = (0, 0, 0, 0)
    total = n ** 4
    if total <= budget:
        for p in range(n):
            G = gromov_matrix(D, p)
            for z in range(n):
                vals = np.minimum.outer(G[:, z], G[z, :]) - G
                k = int(np.argmax(vals))
                v = float(vals.flat[k])
                if v > best:
                    best = v
                    best_w = (k // n, k % n, z, p)
        return DeltaReport(max(0.0, best), best_w, total, budget, seed, True,
                           m.mesh_h)
    rng = np.random.default_rng(seed)
    chunk = 1 << 16
    scanned = 0
    while scanned < budget:
        take = min(chunk, budget - scanned)
        q = rng.integers(0, n, size=(chunk, 4))[:take]
        x, y, z, p = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
        gxz = 0.5 * (D[x, p] + D[z, p] - D[x, z])
        gzy = 0.5 * (D[z, p] + D[y, p] - D[z, y])
        gxy = 0.5 * (D[x, p] + D[y, p] - D[x, y])
        vals = np.minimum(gxz, gzy) - gxy
        k = int(np.argmax(vals))
        v = float(vals[k])
        if v > best:
            best = v
            best_w = (int(x[k]), int(y[k]), int(z[k]), int(p[k]))
        scanned += take
    return DeltaReport(max(0.0, best), best_w, scanned, budget, seed, False,
                       m.mesh_h)


@dataclass(frozen=True)
class VisualData:
    """Visual quasi-metric rho = exp(-eps (x|y)_p) and its chain metametric."""

    base_index: int
    eps: float
    gromov: np.ndarray
    rho: np.ndarray
    chain: np.ndarray


def visual_data(m: MetricOracle, p: int, eps: float) -> VisualData:
    """Visual quasi-metric at base p and the chain-infimum metametric.

    The chain value d(x, y) is the infimum of sum rho(x_i, x_{i+1}) over
    finite chains from x to y, i.e. a shortest path in the complete
    rho-weighted graph; d(x, x) uses chains of at least one step.
    """
    if eps <= 0:
        raise ArgumentError("eps must be positive")
    n = len(m)
    G = gromov_matrix(m.dist, p)
    with np.errstate(over="ignore"):
        rho = np.exp(-eps * G)
    W = np.maximum(rho, 1e-300)
    np.fill_diagonal(W, 0.0)
    if n == 1:
        chain = rho.copy()
    else:
        C = shortest_path(W, method="FW", directed=False)
        chain = C.copy()
        off = C + np.where(np.eye(n, dtype=bool), np.inf, 0.0)
        closed = 2.0 * off.min(axis=1)
        np.fill_diagonal(chain, np.minimum(np.diag(rho), closed))
    for arr in (G, rho, chain):
        arr.setflags(write=False)
    return VisualData(int(p), float(eps), G, rho, chain)
