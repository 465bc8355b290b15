"""Spatial indexing of the data set.

`PointIndex` keeps three views of the same points:

* a linear quadtree: points sorted by Morton code on a dyadic grid, so that
  the points inside any aligned dyadic square form one contiguous slice;
  counts, lexicographically-least members and minima of per-point values
  over unions of aligned squares are then O(log N) with a sparse table;
* a kd-tree (scipy) for nearest neighbours and arbitrary box queries;
* a fair-split tree, from which the well-separated pair decomposition is
  read off.

Squares are half-open, [2^k i, 2^k (i+1)) x [2^k j, 2^k (j+1)).  Dilations
by 5, 25 and 1 + c_G with c_G dyadic have dyadic endpoints, so every
membership test below is exact in binary64.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from . import _backend

GRID_BITS = 31  # bits per axis in the Morton code


# ---------------------------------------------------------------------------
# dyadic squares


@dataclass(frozen=True, order=True)
class DyadicSquare:
    k: int
    i: int
    j: int

    @property
    def side(self) -> float:
        return 2.0 ** self.k

    @property
    def lo(self) -> np.ndarray:
        return np.array([self.i, self.j], dtype=float) * self.side

    @property
    def center(self) -> np.ndarray:
        return (np.array([self.i, self.j], dtype=float) + 0.5) * self.side

    def parent(self) -> "DyadicSquare":
        return DyadicSquare(self.k + 1, self.i >> 1, self.j >> 1)

    def children(self) -> list["DyadicSquare"]:
        k, i, j = self.k - 1, 2 * self.i, 2 * self.j
        return [DyadicSquare(k, i, j), DyadicSquare(k, i + 1, j),
                DyadicSquare(k, i, j + 1), DyadicSquare(k, i + 1, j + 1)]

    def dilated_bounds(self, lam: float) -> tuple[np.ndarray, np.ndarray]:
        """Half-open box lam*Q as (lo, hi)."""
        half = 0.5 * lam
        base = np.array([self.i, self.j], dtype=float) + 0.5
        return (base - half) * self.side, (base + half) * self.side

    def contains(self, p, lam: float = 1.0) -> bool:
        lo, hi = self.dilated_bounds(lam)
        p = np.asarray(p, dtype=float)
        return bool(np.all(lo <= p) and np.all(p < hi))

    @classmethod
    def containing(cls, p, k: int) -> "DyadicSquare":
        s = 2.0 ** k
        return cls(k, int(np.floor(p[0] / s)), int(np.floor(p[1] / s)))


def in_box(pts: np.ndarray, lo, hi) -> np.ndarray:
    return (pts[..., 0] >= lo[0]) & (pts[..., 0] < hi[0]) & (pts[..., 1] >= lo[1]) & (pts[..., 1] < hi[1])


# ---------------------------------------------------------------------------
# Morton codes


def _spread(v: np.ndarray) -> np.ndarray:
    v = v.astype(np.uint64) & np.uint64(0xFFFFFFFF)
    v = (v | (v << np.uint64(16))) & np.uint64(0x0000FFFF0000FFFF)
    v = (v | (v << np.uint64(8))) & np.uint64(0x00FF00FF00FF00FF)
    v = (v | (v << np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    v = (v | (v << np.uint64(2))) & np.uint64(0x3333333333333333)
    v = (v | (v << np.uint64(1))) & np.uint64(0x5555555555555555)
    return v


def morton(ix: np.ndarray, iy: np.ndarray) -> np.ndarray:
    return _spread(ix) | (_spread(iy) << np.uint64(1))


class _SparseMin:
    """Range-minimum over a fixed integer array."""

    def __init__(self, a: np.ndarray):
        self.levels = [np.asarray(a)]
        span = 1
        while 2 * span <= len(a):
            prev = self.levels[-1]
            self.levels.append(np.minimum(prev[:-span], prev[span:]))
            span *= 2

    def query(self, lo: np.ndarray, hi: np.ndarray, empty) -> np.ndarray:
        """min over a[lo:hi] for each pair; ``empty`` where hi <= lo."""
        lo = np.asarray(lo, dtype=np.int64)
        hi = np.asarray(hi, dtype=np.int64)
        out = np.full(lo.shape, empty, dtype=self.levels[0].dtype)
        ok = hi > lo
        if not ok.any():
            return out
        length = hi[ok] - lo[ok]
        lev = np.floor(np.log2(length)).astype(np.int64)
        # guard against rounding in log2 for exact powers of two
        lev = np.where((np.int64(1) << (lev + 1)) <= length, lev + 1, lev)
        lev = np.where((np.int64(1) << lev) > length, lev - 1, lev)
        res = np.empty(length.size, dtype=self.levels[0].dtype)
        for L in np.unique(lev):
            sel = lev == L
            tab = self.levels[int(L)]
            a = lo[ok][sel]
            b = hi[ok][sel] - (1 << int(L))
            res[sel] = np.minimum(tab[a], tab[b])
        out[ok] = res
        return out


# ---------------------------------------------------------------------------
# fair-split tree and WSPD


@dataclass
class SplitTree:
    order: np.ndarray  # permutation of point indices
    start: np.ndarray  # node -> slice start in order
    stop: np.ndarray
    left: np.ndarray  # child ids, -1 for leaves
    right: np.ndarray
    box_lo: np.ndarray  # tight bounding boxes
    box_hi: np.ndarray
    rep: np.ndarray  # lexicographically least point of the node

    def members(self, node: int) -> np.ndarray:
        return self.order[self.start[node]:self.stop[node]]


def build_split_tree(points: np.ndarray, lex_rank: np.ndarray) -> SplitTree:
    n = len(points)
    order = np.arange(n)
    starts, stops, lefts, rights, los, his, reps = [], [], [], [], [], [], []

    def new(a, b):
        idx = order[a:b]
        P = points[idx]
        starts.append(a)
        stops.append(b)
        lefts.append(-1)
        rights.append(-1)
        los.append(P.min(axis=0))
        his.append(P.max(axis=0))
        reps.append(int(idx[np.argmin(lex_rank[idx])]))
        return len(starts) - 1

    root = new(0, n)
    stack = [root]
    while stack:
        v = stack.pop()
        a, b = starts[v], stops[v]
        if b - a <= 1:
            continue
        lo, hi = los[v], his[v]
        ax = int(np.argmax(hi - lo))
        mid = 0.5 * (lo[ax] + hi[ax])
        idx = order[a:b]
        below = points[idx, ax] < mid
        if below.all() or not below.any():  # cannot happen for distinct points
            below = np.zeros(b - a, dtype=bool)
            below[np.argsort(points[idx, ax], kind="stable")[: (b - a) // 2]] = True
        order[a:b] = np.concatenate([idx[below], idx[~below]])
        cut = a + int(below.sum())
        lc, rc = new(a, cut), new(cut, b)
        lefts[v], rights[v] = lc, rc
        stack.extend([lc, rc])
    return SplitTree(order, np.array(starts), np.array(stops), np.array(lefts), np.array(rights),
                     np.array(los).reshape(-1, 2), np.array(his).reshape(-1, 2), np.array(reps))


@dataclass
class WSPD:
    """Pairs of split-tree nodes; ordered pair (A, B) for each listed row."""

    tree: SplitTree
    a: np.ndarray
    b: np.ndarray
    kappa: float

    def __len__(self) -> int:
        return self.a.size

    @property
    def rep_left(self) -> np.ndarray:
        return self.tree.rep[self.a]

    @property
    def rep_right(self) -> np.ndarray:
        return self.tree.rep[self.b]

    def left(self, ell: int) -> np.ndarray:
        return self.tree.members(int(self.a[ell]))

    def right(self, ell: int) -> np.ndarray:
        return self.tree.members(int(self.b[ell]))


def _box_diam(lo, hi):
    d = hi - lo
    return np.hypot(d[..., 0], d[..., 1])


def _box_dist(lo1, hi1, lo2, hi2):
    gap = np.maximum(0.0, np.maximum(lo1 - hi2, lo2 - hi1))
    return np.hypot(gap[..., 0], gap[..., 1])


def build_wspd_from_tree(tree: SplitTree, kappa: float) -> WSPD:
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    a, b = _backend.kernels.wspd_pairs(
        np.ascontiguousarray(tree.box_lo, dtype=float), np.ascontiguousarray(tree.box_hi, dtype=float),
        np.ascontiguousarray(tree.left, dtype=np.int64), np.ascontiguousarray(tree.right, dtype=np.int64),
        float(kappa))
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    order = np.lexsort((b, a))
    a, b = a[order], b[order]
    return WSPD(tree, np.concatenate([a, b]), np.concatenate([b, a]), kappa)


# ---------------------------------------------------------------------------
# the index


MAGIC = b"C2PIDX"
VERSION = (1, 0, 0)


class PointIndex:
    def __init__(self, points):
        pts = np.ascontiguousarray(np.asarray(points, dtype=float).reshape(-1, 2))
        if pts.shape[0] == 0:
            raise ValueError("empty point set")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        uniq = np.unique(pts, axis=0)
        if uniq.shape[0] != pts.shape[0]:
            raise ValueError("duplicate points")
        self.points = pts
        self.n = pts.shape[0]
        self.kd = cKDTree(pts)
        lex = np.lexsort((pts[:, 1], pts[:, 0]))
        self.lex_rank = np.empty(self.n, dtype=np.int64)
        self.lex_rank[lex] = np.arange(self.n)
        self.lex_order = lex
        # Morton grid: [-2^K, 2^K)^2 split into 2^GRID_BITS cells per axis
        span = float(np.max(np.abs(pts))) if self.n else 1.0
        self.K = max(int(np.floor(np.log2(span))) + 1 if span > 0 else 0, 1)
        self.L0 = self.K + 1 - GRID_BITS
        cell = 2.0 ** self.L0
        off = 2 ** (GRID_BITS - 1)
        ix = np.floor(pts[:, 0] / cell).astype(np.int64) + off
        iy = np.floor(pts[:, 1] / cell).astype(np.int64) + off
        codes = morton(ix, iy)
        self.morton_order = np.argsort(codes, kind="stable")
        self.codes = codes[self.morton_order]
        self._lexmin = _SparseMin(self.lex_rank[self.morton_order])
        self._split: SplitTree | None = None

    # -- aligned-square primitives --------------------------------------

    def _cell_range(self, k: np.ndarray, i: np.ndarray, j: np.ndarray):
        """Slices of the Morton order covering aligned squares (k, i, j).

        Squares finer than the grid or outside it get an empty slice and a
        ``fallback`` flag for the fine case.
        """
        k = np.asarray(k, dtype=np.int64)
        i = np.asarray(i, dtype=np.int64)
        j = np.asarray(j, dtype=np.int64)
        shift = k - self.L0
        fine = (shift < 0) | (shift > GRID_BITS)
        sh = np.where(fine, 0, shift)
        off = np.int64(2 ** (GRID_BITS - 1))
        ci = (i << sh) + off
        cj = (j << sh) + off
        lim = np.int64(2 ** GRID_BITS)
        size = np.int64(1) << sh
        inside = (~fine) & (ci >= 0) & (cj >= 0) & (ci + size <= lim) & (cj + size <= lim)
        lo_code = morton(np.where(inside, ci, 0), np.where(inside, cj, 0))
        hi_code = lo_code + (size * size).astype(np.uint64)
        a = np.searchsorted(self.codes, lo_code, side="left")
        b = np.searchsorted(self.codes, hi_code, side="left")
        # squares that straddle the grid boundary cannot hold points only if
        # wholly outside; a partially covered square is clipped below.
        partial = (~fine) & (~inside)
        a = np.where(inside, a, 0)
        b = np.where(inside, b, 0)
        return a, b, fine | partial

    def _box_fallback(self, lo, hi) -> np.ndarray:
        c = 0.5 * (np.asarray(lo) + np.asarray(hi))
        r = 0.5 * float(np.max(np.asarray(hi) - np.asarray(lo)))
        cand = np.asarray(self.kd.query_ball_point(c, r, p=np.inf), dtype=np.int64)
        if cand.size == 0:
            return cand
        return np.sort(cand[in_box(self.points[cand], lo, hi)])

    def block_stats(self, k, i, j, radius: int, values: _SparseMin | None = None, empty=None):
        """For each square (k, i[s], j[s]) and its (2*radius+1)^2 block of
        same-size neighbours, return (count, lexmin_rank, value_min)."""
        i = np.asarray(i, dtype=np.int64)
        j = np.asarray(j, dtype=np.int64)
        m = i.size
        count = np.zeros(m, dtype=np.int64)
        lexmin = np.full(m, self.n, dtype=np.int64)
        vmin = None if values is None else np.full(m, empty)
        fallback = np.zeros(m, dtype=bool)
        for di in range(-radius, radius + 1):
            for dj in range(-radius, radius + 1):
                a, b, fb = self._cell_range(np.full(m, k), i + di, j + dj)
                fallback |= fb
                count += b - a
                lexmin = np.minimum(lexmin, self._lexmin.query(a, b, self.n))
                if values is not None:
                    vmin = np.minimum(vmin, values.query(a, b, empty))
        if fallback.any():
            side = 2.0 ** k
            for s in np.flatnonzero(fallback):
                lo = np.array([i[s] - radius, j[s] - radius], dtype=float) * side
                hi = np.array([i[s] + radius + 1, j[s] + radius + 1], dtype=float) * side
                idx = self._box_fallback(lo, hi)
                count[s] = idx.size
                lexmin[s] = self.lex_rank[idx].min() if idx.size else self.n
                if values is not None:
                    vmin[s] = values.levels[0][self._morton_pos(idx)].min() if idx.size else empty
        return count, lexmin, vmin

    def _morton_pos(self, idx: np.ndarray) -> np.ndarray:
        inv = getattr(self, "_morton_inv", None)
        if inv is None:
            inv = np.empty(self.n, dtype=np.int64)
            inv[self.morton_order] = np.arange(self.n)
            self._morton_inv = inv
        return inv[idx]

    def value_table(self, per_point: np.ndarray) -> _SparseMin:
        """Range-minimum structure for a per-point array (Morton order)."""
        return _SparseMin(np.asarray(per_point)[self.morton_order])

    # -- queries ----------------------------------------------------------

    def points_in_box(self, lo, hi) -> np.ndarray:
        return self._box_fallback(lo, hi)

    def points_in_dilated(self, Q: DyadicSquare, lam: float) -> np.ndarray:
        lo, hi = Q.dilated_bounds(lam)
        return self._box_fallback(lo, hi)

    def empty_query(self, Q: DyadicSquare) -> bool:
        lo, hi = Q.dilated_bounds(25.0)
        r = 12.5 * Q.side
        d, _ = self.kd.query(Q.center, k=1, p=np.inf)
        if d < r:
            return False
        if d > r:
            return True
        return self._box_fallback(lo, hi).size == 0

    def nearest_in_boxes(self, centers, half) -> np.ndarray:
        """For each box [c - h, c + h), the point nearest to c in the max-norm
        (ties: lexicographic), or -1 when the box holds no point."""
        centers = np.asarray(centers, dtype=float).reshape(-1, 2)
        half = np.broadcast_to(np.asarray(half, dtype=float), (len(centers),))
        out = np.full(len(centers), -1, dtype=np.int64)
        if len(centers) == 0:
            return out
        kq = min(2, self.n)
        d, nb = self.kd.query(centers, k=kq, p=np.inf)
        d = d.reshape(len(centers), kq)
        nb = nb.reshape(len(centers), kq)
        clean = (d[:, 0] < half) & ((d[:, 1] > d[:, 0]) if kq > 1 else True)
        out[clean] = nb[clean, 0]
        for s in np.flatnonzero(~clean & (d[:, 0] <= half)):
            cand = self._box_fallback(centers[s] - half[s], centers[s] + half[s])
            if cand.size == 0:
                continue
            dd = np.max(np.abs(self.points[cand] - centers[s]), axis=1)
            best = cand[dd == dd.min()]
            out[s] = best[np.argmin(self.lex_rank[best])]
        return out

    def rep_query(self, Q: DyadicSquare) -> tuple[int | None, bool]:
        """(index, in_5Q): the lexicographically least point of E in 5Q;
        failing that the point of E in 25Q nearest the centre (max-norm,
        lexicographic ties); else (None, False)."""
        idx = self.points_in_dilated(Q, 5.0)
        if idx.size:
            return int(idx[np.argmin(self.lex_rank[idx])]), True
        r = int(self.nearest_in_boxes(Q.center, 12.5 * Q.side)[0])
        return (r, False) if r >= 0 else (None, False)

    def k_nearest_indices(self, x, k: int) -> np.ndarray:
        """k nearest points; ties broken by lexicographic order."""
        x = np.asarray(x, dtype=float).reshape(2)
        k = min(k, self.n)
        if k <= 0:
            return np.zeros(0, dtype=np.int64)
        dist, _ = self.kd.query(x, k=k)
        rk = float(np.atleast_1d(dist)[-1])
        cand = np.asarray(self.kd.query_ball_point(x, rk * (1 + 1e-12) + 1e-300), dtype=np.int64)
        d = np.hypot(self.points[cand, 0] - x[0], self.points[cand, 1] - x[1])
        order = np.lexsort((self.lex_rank[cand], d))
        return cand[order[:k]]

    def k_nearest(self, x, k: int) -> np.ndarray:
        return self.points[self.k_nearest_indices(x, k)]

    def knn_all(self, k: int) -> np.ndarray:
        """k nearest neighbours of every data point (itself first)."""
        k = min(k, self.n)
        kk = min(k + 1, self.n)
        dist, idx = self.kd.query(self.points, k=kk)
        dist = dist.reshape(self.n, kk)
        idx = idx.reshape(self.n, kk)
        out = np.empty((self.n, k), dtype=np.int64)
        for r in range(self.n):
            # exact distances, then (distance, lexicographic) ordering
            cand = idx[r]
            d = np.hypot(self.points[cand, 0] - self.points[r, 0], self.points[cand, 1] - self.points[r, 1])
            tie = kk > k and dist[r, k - 1] >= dist[r, k] * (1 - 1e-12)
            if tie:
                out[r] = self.k_nearest_indices(self.points[r], k)
                continue
            order = np.lexsort((self.lex_rank[cand], d))
            out[r] = cand[order[:k]]
        return out

    # -- WSPD ---------------------------------------------------------------

    @property
    def split_tree(self) -> SplitTree:
        if self._split is None:
            self._split = build_split_tree(self.points, self.lex_rank)
        return self._split

    def build_wspd(self, kappa: float) -> WSPD:
        if self.n < 2:
            t = self.split_tree
            return WSPD(t, np.zeros(0, np.int64), np.zeros(0, np.int64), kappa)
        return build_wspd_from_tree(self.split_tree, kappa)

    # -- persistence ----------------------------------------------------------

    def to_bytes(self) -> bytes:
        buf = io.BytesIO()
        buf.write(MAGIC)
        buf.write(struct.pack("<3H", *VERSION))
        buf.write(struct.pack("<q", self.n))
        buf.write(self.points.astype("<f8").tobytes())
        buf.write(self.morton_order.astype("<i8").tobytes())
        buf.write(self.codes.astype("<u8").tobytes())
        return buf.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "PointIndex":
        view = memoryview(data)
        if bytes(view[:6]) != MAGIC:
            raise ValueError("not an index file")
        major = struct.unpack("<3H", view[6:12])[0]
        if major != VERSION[0]:
            raise ValueError(f"unsupported index version {major}")
        n = struct.unpack("<q", view[12:20])[0]
        off = 20
        pts = np.frombuffer(view[off:off + 16 * n], dtype="<f8").reshape(n, 2).astype(float)
        off += 16 * n
        order = np.frombuffer(view[off:off + 8 * n], dtype="<i8").astype(np.int64)
        off += 8 * n
        codes = np.frombuffer(view[off:off + 8 * n], dtype="<u8")
        idx = cls(pts)
        if not (np.array_equal(idx.morton_order, order) and np.array_equal(idx.codes, codes)):
            raise ValueError("index file is inconsistent with its points")
        return idx


def build_index(E) -> PointIndex:
    return PointIndex(E)


def build_wspd(index: PointIndex, kappa: float) -> WSPD:
    return index.build_wspd(kappa)


def empty_query(index: PointIndex, Q: DyadicSquare) -> bool:
    return index.empty_query(Q)


def rep_query(index: PointIndex, Q: DyadicSquare):
    return index.rep_query(Q)


def points_in_dilated(index: PointIndex, Q: DyadicSquare, lam: float) -> np.ndarray:
    return index.points_in_dilated(Q, lam)


def k_nearest(index: PointIndex, x, k: int) -> np.ndarray:
    return index.k_nearest_indices(x, k)
