"""Discretization of domains into weighted proximity graphs.

``sample_net`` lays a jittered lattice over a window of the domain.  Cells
shrink dyadically toward the boundary (a point sampled at spacing s must
satisfy d(x) >= 6 s), so that every kept point has graph neighbors obeying
the edge rule |x - y| <= min(d(x), d(y))/4 while the net still reaches
within about 0.75 h of the boundary.  Construction is deterministic for a
given seed.
"""

from __future__ import annotations

from typing import Optional, Tuple

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .domains import Domain
from .errors import ArgumentError, DiscretizationError
from .geometry import as_point, as_points

__all__ = ["SampledDomain", "sample_net"]

EDGE_FRACTION = 0.25          # edge rule: |x-y| <= min(d(x), d(y)) * EDGE_FRACTION
DEPTH_FACTOR = 6.0            # keep a point at spacing s only if d(x) >= 6 s


class SampledDomain:
    """Immutable net: points, boundary sample, and the edge graph.

    Attributes
    ----------
    points : (m, n) array
        Net points inside the domain.
    levels : (m,) int array
        Refinement level of each point; local spacing is h / 2**level.
    bdist : (m,) array
        Exact distance to the domain boundary for each point.
    boundary : (b, n) array
        Boundary sample at spacing <= h.
    edges : (E, 2) int array, edge_lengths : (E,) array
        Undirected edges satisfying the edge rule, lexicographically sorted.
    """

    def __init__(self, domain: Domain, mesh_h: float, seed: int,
                 bounds: Tuple[np.ndarray, np.ndarray], jitter: float,
                 points: np.ndarray, levels: np.ndarray, bdist: np.ndarray,
                 boundary: np.ndarray, edges: np.ndarray,
                 edge_lengths: np.ndarray):
        self.domain = domain
        self.mesh_h = float(mesh_h)
        self.seed = int(seed)
        self.bounds = (np.asarray(bounds[0], float).copy(),
                       np.asarray(bounds[1], float).copy())
        self.jitter = float(jitter)
        self.points = points
        self.levels = levels
        self.bdist = bdist
        self.boundary = boundary
        self.edges = edges
        self.edge_lengths = edge_lengths
        for arr in (self.points, self.levels, self.bdist, self.boundary,
                    self.edges, self.edge_lengths, *self.bounds):
            arr.setflags(write=False)
        self._tree: Optional[cKDTree] = None
        self._graph: Optional[csr_matrix] = None

    # -- derived structures -------------------------------------------------

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def spacing_of(self, index: int) -> float:
        return self.mesh_h / (2.0 ** int(self.levels[index]))

    @property
    def tree(self) -> cKDTree:
        if self._tree is None:
            self._tree = cKDTree(self.points)
        return self._tree

    def graph(self, weights: np.ndarray) -> csr_matrix:
        """Symmetric sparse graph over the net with the given edge weights."""
        i, j = self.edges[:, 0], self.edges[:, 1]
        m = self.n_points
        mat = coo_matrix(
            (np.concatenate([weights, weights]),
             (np.concatenate([i, j]), np.concatenate([j, i]))),
            shape=(m, m))
        return mat.tocsr()

    def euclidean_graph(self) -> csr_matrix:
        if self._graph is None:
            self._graph = self.graph(self.edge_lengths)
        return self._graph

    def nearest(self, x) -> Tuple[int, float]:
        """Index of the nearest net point and its distance."""
        p = as_point(x)
        dist, idx = self.tree.query(p)
        return int(idx), float(dist)

    def __repr__(self):
        return (f"SampledDomain({type(self.domain).__name__}, h={self.mesh_h}, "
                f"n={self.n_points}, edges={len(self.edges)})")


def _lattice(lo: np.ndarray, hi: np.ndarray, s: float) -> np.ndarray:
    """Absolute lattice (multiples of s) covering the box, as (m, n) points."""
    axes = []
    for k in range(len(lo)):
        k0 = int(np.ceil(lo[k] / s - 1e-12))
        k1 = int(np.floor(hi[k] / s + 1e-12))
        if k1 < k0:
            return np.empty((0, len(lo)))
        axes.append(np.arange(k0, k1 + 1) * s)
    grids = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([g.ravel() for g in grids])


def sample_net(domain: Domain, h: float, bounds=None, seed: int = 0, *,
               refinement_levels: int = 3, jitter: float = 0.1,
               neighbor_scale: float = 2.4,
               require_connected: bool = True) -> SampledDomain:
    """Deterministic graded net of ``domain`` within ``bounds``.

    Parameters
    ----------
    h : float
        Base spacing; the coarsest cells have this size, boundary bands
        refine down to h / 2**refinement_levels.
    bounds : pair of corner points, optional
        Sampling window; defaults to the domain's natural box (bounded
        variants only).
    jitter : float
        Relative lattice jitter in [0, 0.2].
    """
    if h <= 0:
        raise ArgumentError("h must be positive")
    if not 0.0 <= jitter <= 0.2:
        raise ArgumentError("jitter must lie in [0, 0.2]")
    if refinement_levels < 0:
        raise ArgumentError("refinement_levels must be >= 0")
    if bounds is None:
        box = domain.default_box()
        if box is None:
            raise ArgumentError(
                f"{type(domain).__name__} is unbounded: bounds are required")
        lo, hi = box
    else:
        lo = np.asarray(bounds[0], float)
        hi = np.asarray(bounds[1], float)
    if lo.shape != (domain.dim,) or hi.shape != (domain.dim,):
        raise ArgumentError("bounds must be a pair of corner points of the "
                            "domain's dimension")
    if not np.all(lo < hi):
        raise ArgumentError("bounds corners must be strictly ordered")

    rng = np.random.default_rng(seed)
    pts_by_level = []
    bd_by_level = []
    for lev in range(refinement_levels + 1):
        s = h / (2.0 ** lev)
        lattice = _lattice(lo, hi, s)
        if len(lattice) == 0:
            pts_by_level.append(np.empty((0, domain.dim)))
            bd_by_level.append(np.empty(0))
            continue
        pts = lattice + rng.uniform(-jitter * s, jitter * s, size=lattice.shape)
        inside = domain.contains_many(pts)
        inside &= np.all((pts >= lo[None, :]) & (pts <= hi[None, :]), axis=1)
        pts = pts[inside]
        d = domain._boundary_set_distance(pts)
        keep = d >= DEPTH_FACTOR * s
        if lev > 0:
            keep &= d < DEPTH_FACTOR * (2.0 * s)
        pts_by_level.append(pts[keep])
        bd_by_level.append(d[keep])

    counts = [len(p) for p in pts_by_level]
    points = np.vstack(pts_by_level)
    if len(points) == 0:
        raise DiscretizationError(
            f"net is empty: no lattice point of spacing {h} (with "
            f"{refinement_levels} refinement levels) satisfies "
            f"d(x) >= {DEPTH_FACTOR}*spacing inside the window")
    bdist = np.concatenate(bd_by_level)
    levels = np.repeat(np.arange(refinement_levels + 1), counts)

    # Candidate edges: same-level proximity plus adjacent-level stitching.
    offsets = np.concatenate([[0], np.cumsum(counts)])
    trees = [cKDTree(pts_by_level[lev]) if counts[lev] else None
             for lev in range(refinement_levels + 1)]
    cand = []
    for lev in range(refinement_levels + 1):
        if trees[lev] is None:
            continue
        s = h / (2.0 ** lev)
        pairs = trees[lev].query_pairs(neighbor_scale * s, output_type="ndarray")
        if len(pairs):
            cand.append(pairs + offsets[lev])
        if lev + 1 <= refinement_levels and trees[lev + 1] is not None:
            hits = trees[lev].query_ball_tree(trees[lev + 1], 1.6 * s)
            pairs = [(offsets[lev] + i, offsets[lev + 1] + j)
                     for i, js in enumerate(hits) for j in js]
            if pairs:
                cand.append(np.asarray(pairs, dtype=np.int64))
    if cand:
        edges = np.vstack(cand)
        lengths = np.linalg.norm(points[edges[:, 0]] - points[edges[:, 1]], axis=1)
        ok = lengths <= EDGE_FRACTION * np.minimum(bdist[edges[:, 0]],
                                                   bdist[edges[:, 1]])
        ok &= lengths > 0
        edges = edges[ok]
        lengths = lengths[ok]
        order = np.lexsort((edges[:, 1], edges[:, 0]))
        edges = np.ascontiguousarray(edges[order])
        lengths = lengths[order]
    else:
        edges = np.empty((0, 2), dtype=np.int64)
        lengths = np.empty(0)

    window_pad = h
    bwin = (lo - window_pad, hi + window_pad)
    boundary = domain.boundary_points(h, window=bwin)

    net = SampledDomain(domain, h, seed, (lo, hi), jitter, points, levels,
                        bdist, boundary, edges, lengths)

    ncomp, labels = connected_components(net.euclidean_graph(), directed=False)
    if ncomp > 1 and require_connected:
        sizes = np.bincount(labels)
        raise DiscretizationError(
            f"net is disconnected: {ncomp} components with sizes "
            f"{sorted(sizes.tolist(), reverse=True)[:5]} (of {net.n_points} "
            f"points at h={h}); refine h or enlarge the window")
    return net
