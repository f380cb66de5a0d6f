"""Triple/quadruple distortion scans and bucketed sup envelopes.

A scan walks ordered tuples of a finite sample, computes the input ratio
(triple ratio for quasisymmetry, cross ratio for quasimobius) and the
corresponding image ratio, and records the per-bucket supremum of image
ratios over 64 log-spaced buckets of input ratio spanning [1e-4, 1e4].
Every bucket keeps the first tuple (in deterministic scan order) that
attains its supremum, so reported witnesses reproduce their bucket values
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional, Tuple

import numpy as np

from .control import ControlFunction
from .errors import ArgumentError, EmptyScanError
from .geometry import INFINITY, as_points, is_infinity
from .maps import Map

__all__ = ["BUCKET_EDGES", "DistortionEnvelope", "qs_scan", "qm_scan"]

N_BUCKETS = 64
BUCKET_EDGES = np.geomspace(1e-4, 1e4, N_BUCKETS + 1)
_LOG_EDGES = np.round(np.log10(BUCKET_EDGES), 6)
_CHUNK = 1 << 18


def _bucket_of(t: np.ndarray) -> np.ndarray:
    """Stable bucket index: log10 rounded to 6 decimals, ends clipped."""
    lt = np.round(np.log10(t), 6)
    return np.digitize(lt, _LOG_EDGES[1:-1], right=False)


@dataclass
class DistortionEnvelope:
    """Bucketed sup of image ratios against input ratios, with witnesses."""

    kind: str                      # "triple" or "quadruple"
    edges: np.ndarray
    sup: np.ndarray                # -inf on empty buckets
    count: np.ndarray
    witness_in: np.ndarray         # input ratio of the witness tuple
    witness_idx: np.ndarray        # (n_buckets, 4) indices, -1 padded
    scanned: int
    skipped: int
    exhaustive: bool
    seed: int
    budget: int
    infinity_index: Optional[int] = None   # index encoding INFINITY, if scanned

    @property
    def nonempty(self) -> np.ndarray:
        return self.count > 0

    @property
    def centers(self) -> np.ndarray:
        return np.sqrt(self.edges[:-1] * self.edges[1:])

    def max_sup(self) -> float:
        if not np.any(self.nonempty):
            raise EmptyScanError("envelope is empty")
        return float(self.sup[self.nonempty].max())

    def monotone_sup(self) -> np.ndarray:
        """Least nondecreasing majorant of the bucket sups (monotone fill)."""
        out = np.where(self.nonempty, self.sup, -np.inf)
        return np.maximum.accumulate(out)

    def dominated_by(self, cf: ControlFunction, rtol: float = 1e-9) -> bool:
        """True if sup <= cf(witness input ratio) on every nonempty bucket."""
        ok, _ = self.domination_margin(cf, rtol)
        return ok

    def domination_margin(self, cf: ControlFunction, rtol: float = 1e-9
                          ) -> Tuple[bool, float]:
        """Worst sup/cf(t_witness) over nonempty buckets, and the verdict."""
        mask = self.nonempty
        if not np.any(mask):
            return True, 0.0
        bound = np.asarray(cf(self.witness_in[mask]))
        ratio = self.sup[mask] / bound
        worst = float(ratio.max())
        return worst <= 1.0 + rtol, worst

    def fit_power(self, alpha: float) -> float:
        """Least M with sup <= M (t**(1/alpha) ∨ t**alpha) at all witnesses."""
        if alpha < 1:
            raise ArgumentError("alpha must be >= 1")
        mask = self.nonempty
        if not np.any(mask):
            raise EmptyScanError("cannot fit an empty envelope")
        t = self.witness_in[mask]
        phi = np.where(t <= 1.0, t ** (1.0 / alpha), t ** alpha)
        return float((self.sup[mask] / phi).max())

    def to_csv(self, path) -> None:
        """Rows (t_bucket, sup_ratio, witness_id) for nonempty buckets."""
        rows = []
        for b in range(len(self.sup)):
            if self.count[b]:
                wid = ":".join(str(i) for i in self.witness_idx[b] if i >= 0)
                rows.append(f"{self.centers[b]:.17g},{self.sup[b]:.17g},{wid}")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("t_bucket,sup_ratio,witness_id\n")
            fh.write("\n".join(rows) + ("\n" if rows else ""))


# A stream yields chunks (t_in, t_out, idx_cols, n_skipped) in a fixed,
# regenerable order; scans run every stream twice (sup pass, witness pass).
Chunk = Tuple[np.ndarray, np.ndarray, List[np.ndarray], int]
Stream = Callable[[], Iterator[Chunk]]


def _tuple_stream(m: int, k: int, budget: int, seed: int):
    total = m ** k
    if total <= budget:
        for start in range(0, total, _CHUNK):
            flat = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
            cols = []
            rem = flat
            for _ in range(k):
                cols.append(rem % m)
                rem = rem // m
            yield tuple(reversed(cols))
    else:
        rng = np.random.default_rng(seed)
        drawn = 0
        while drawn < budget:
            take = min(_CHUNK, budget - drawn)
            q = rng.integers(0, m, size=(_CHUNK, k))[:take]
            yield tuple(q[:, i] for i in range(k))
            drawn += take


def _run_scan(kind: str, streams: List[Stream], exhaustive: bool, seed: int,
              budget: int, infinity_index: Optional[int]) -> DistortionEnvelope:
    sup = np.full(N_BUCKETS, -np.inf)
    count = np.zeros(N_BUCKETS, dtype=np.int64)
    scanned = 0
    skipped = 0
    for stream in streams:
        for t_in, t_out, _, n_skip in stream():
            skipped += n_skip
            if len(t_in) == 0:
                continue
            b = _bucket_of(t_in)
            np.maximum.at(sup, b, t_out)
            np.add.at(count, b, 1)
            scanned += len(t_in)
    witness_in = np.zeros(N_BUCKETS)
    witness_idx = np.full((N_BUCKETS, 4), -1, dtype=np.int64)
    found = np.zeros(N_BUCKETS, dtype=bool)
    for stream in streams:
        if found.all():
            break
        for t_in, t_out, idx_cols, _ in stream():
            if len(t_in) == 0:
                continue
            b = _bucket_of(t_in)
            for bucket in np.unique(b):
                if found[bucket]:
                    continue
                hit = np.flatnonzero((b == bucket) & (t_out == sup[bucket]))
                if len(hit):
                    k = int(hit[0])
                    found[bucket] = True
                    witness_in[bucket] = t_in[k]
                    cols = [int(c[k]) for c in idx_cols] + [-1] * (4 - len(idx_cols))
                    witness_idx[bucket] = cols
            if found.all():
                break
    return DistortionEnvelope(
        kind=kind, edges=BUCKET_EDGES.copy(), sup=sup, count=count,
        witness_in=witness_in, witness_idx=witness_idx, scanned=scanned,
        skipped=skipped, exhaustive=exhaustive, seed=seed, budget=budget,
        infinity_index=infinity_index)


def _distance_matrix(X: np.ndarray) -> np.ndarray:
    diff = X[:, None, :] - X[None, :, :]
    D = np.sqrt(np.sum(diff * diff, axis=-1))
    U = np.triu(D, 1)
    return U + U.T


def _resolve_subset(m: int, A) -> Optional[np.ndarray]:
    if A is None:
        return None
    A = np.asarray(A)
    if A.dtype == bool:
        if A.shape != (m,):
            raise ArgumentError("boolean subset mask must match the sample size")
        return A
    mask = np.zeros(m, dtype=bool)
    mask[A.astype(np.int64)] = True
    return mask


def qs_scan(f: Map, X, A=None, *, budget: int = 2_000_000,
            seed: int = 0) -> DistortionEnvelope:
    """Quasisymmetry scan: triple-ratio distortion envelope of f on X.

    Scans ordered triples (x, y, z) with ratio |y-x|/|z-x|; with a subset A
    the scan restricts to triples of the pair (X, A), i.e. x in A or both
    y, z in A.  Exhaustive when the number of triples fits the budget,
    seeded uniform sampling otherwise.  Tuples whose image ratio is 0/0 or
    n/0 are skipped and counted.
    """
    X = as_points(X)
    m = len(X)
    if m < 3:
        raise ArgumentError("need at least 3 points")
    Y = f.apply_many(X)
    Din = _distance_matrix(X)
    Dout = _distance_matrix(Y)
    inA = _resolve_subset(m, A)

    def stream():
        for cols in _tuple_stream(m, 3, budget, seed):
            i, j, k = cols
            keep = (i != j) & (i != k) & (j != k)
            if inA is not None:
                keep &= inA[i] | (inA[j] & inA[k])
            i, j, k = i[keep], j[keep], k[keep]
            if len(i) == 0:
                yield (np.empty(0), np.empty(0), [], 0)
                continue
            den_in = Din[i, k]
            den_out = Dout[i, k]
            valid = (den_in > 0) & (den_out > 0)
            n_skip = int(len(valid) - valid.sum())
            i, j, k = i[valid], j[valid], k[valid]
            t_in = Din[i, j] / Din[i, k]
            t_out = Dout[i, j] / Dout[i, k]
            yield (t_in, t_out, [i, j, k], n_skip)

    exhaustive = m ** 3 <= budget
    return _run_scan("triple", [stream], exhaustive, seed, budget, None)


def qm_scan(f: Map, X, A=None, *, with_infinity: bool = False,
            budget: int = 2_000_000, seed: int = 0) -> DistortionEnvelope:
    """Quasimobius scan: cross-ratio distortion envelope of f on X.

    Scans ordered quadruples (x, y, z, w) with the cross ratio
    (|x-z| |y-w|)/(|x-y| |z-w|); with a subset A it restricts to quadruples
    of the pair (X, A), i.e. both x, w in A or both y, z in A.  With
    ``with_infinity`` the point at infinity joins the sample (encoded as
    index len(X) in witnesses); cross ratios through it use the
    cancellation rule on both the source and the image side.
    """
    X = as_points(X)
    m = len(X)
    if m + int(with_infinity) < 4:
        raise ArgumentError("need at least 4 points")
    Y = f.apply_many(X)
    Din = _distance_matrix(X)
    Dout = _distance_matrix(Y)
    inA = _resolve_subset(m, A)

    def bulk_stream():
        for cols in _tuple_stream(m, 4, budget, seed):
            x, y, z, w = cols
            keep = ((x != y) & (x != z) & (x != w)
                    & (y != z) & (y != w) & (z != w))
            if inA is not None:
                keep &= (inA[x] & inA[w]) | (inA[y] & inA[z])
            x, y, z, w = x[keep], y[keep], z[keep], w[keep]
            if len(x) == 0:
                yield (np.empty(0), np.empty(0), [], 0)
                continue
            den_in = Din[x, y] * Din[z, w]
            den_out = Dout[x, y] * Dout[z, w]
            valid = (den_in > 0) & (den_out > 0)
            n_skip = int(len(valid) - valid.sum())
            x, y, z, w = x[valid], y[valid], z[valid], w[valid]
            t_in = (Din[x, z] * Din[y, w]) / (Din[x, y] * Din[z, w])
            t_out = (Dout[x, z] * Dout[y, w]) / (Dout[x, y] * Dout[z, w])
            yield (t_in, t_out, [x, y, z, w], n_skip)

    streams: List[Stream] = [bulk_stream]
    if with_infinity:
        g = f.apply(INFINITY)
        g_inf = is_infinity(g)
        dist_g = None if g_inf else np.linalg.norm(Y - np.asarray(g)[None, :], axis=1)

        def src_ratio(slot, a, b, c):
            # reduced cross ratio with INFINITY in the given slot; the three
            # finite entries (a, b, c) fill the remaining slots in order
            if slot == 0:                       # (inf, y, z, w): |y-w|/|z-w|
                return Din[a, c], Din[b, c]
            if slot == 1:                       # (x, inf, z, w): |x-z|/|z-w|
                return Din[a, b], Din[b, c]
            if slot == 2:                       # (x, y, inf, w): |y-w|/|x-y|
                return Din[b, c], Din[a, b]
            return Din[a, c], Din[a, b]         # (x, y, z, inf): |x-z|/|x-y|

        def img_reduced(slot, a, b, c):
            # f fixes infinity: the image cross ratio reduces the same way
            if slot == 0:
                return Dout[a, c], Dout[b, c]
            if slot == 1:
                return Dout[a, b], Dout[b, c]
            if slot == 2:
                return Dout[b, c], Dout[a, b]
            return Dout[a, c], Dout[a, b]

        def img_full(slot, a, b, c):
            # full image cross ratio with g substituted into the slot
            if slot == 0:   # (g, a, b, c) as (x, y, z, w)
                num = dist_g[b] * Dout[a, c]
                den = dist_g[a] * Dout[b, c]
            elif slot == 1:  # (a, g, b, c)
                num = Dout[a, b] * dist_g[c]
                den = dist_g[a] * Dout[b, c]
            elif slot == 2:  # (a, b, g, c)
                num = dist_g[a] * Dout[b, c]
                den = Dout[a, b] * dist_g[c]
            else:            # (a, b, c, g)
                num = Dout[a, c] * dist_g[b]
                den = Dout[a, b] * dist_g[c]
            return num, den

        def make_inf_stream(slot):
            def stream():
                for cols in _tuple_stream(m, 3, budget, seed + slot + 1):
                    a, b, c = cols
                    keep = (a != b) & (a != c) & (b != c)
                    if inA is not None:
                        finite_slots = [s for s in range(4) if s != slot]
                        member = {finite_slots[0]: inA[a],
                                  finite_slots[1]: inA[b],
                                  finite_slots[2]: inA[c],
                                  slot: np.zeros(len(a), dtype=bool)}
                        keep &= ((member[0] & member[3]) | (member[1] & member[2]))
                    a2, b2, c2 = a[keep], b[keep], c[keep]
                    if len(a2) == 0:
                        yield (np.empty(0), np.empty(0), [], 0)
                        continue
                    num_in, den_in = src_ratio(slot, a2, b2, c2)
                    if g_inf:
                        num_out, den_out = img_reduced(slot, a2, b2, c2)
                    else:
                        num_out, den_out = img_full(slot, a2, b2, c2)
                    valid = (den_in > 0) & (den_out > 0)
                    n_skip = int(len(valid) - valid.sum())
                    av, bv, cv = a2[valid], b2[valid], c2[valid]
                    t_in = num_in[valid] / den_in[valid]
                    t_out = num_out[valid] / den_out[valid]
                    finite_slots = [s for s in range(4) if s != slot]
                    by_slot = {finite_slots[0]: av, finite_slots[1]: bv,
                               finite_slots[2]: cv,
                               slot: np.full(len(av), m, dtype=np.int64)}
                    idx_cols = [by_slot[s] for s in range(4)]
                    yield (t_in, t_out, idx_cols, n_skip)
            return stream

        streams.extend(make_inf_stream(slot) for slot in range(4))

    exhaustive = m ** 4 <= budget
    env = _run_scan("quadruple", streams, exhaustive, seed, budget,
                    m if with_infinity else None)
    return env
