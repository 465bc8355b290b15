"""Calderon-Zygmund decomposition of the plane adapted to the data.

A dyadic square Q of side at most A2^-1 is *OK* when E∩5Q holds at most one
point or every point of E∩5Q has a gradient body of diameter at least
A1 * side(Q).  The decomposition is the family of maximal OK squares.  OK is
inherited by children, so it is built top down from the tiles of side
A2^-1, splitting every square that fails the test.

Only tiles whose 5-fold dilation meets E and their descendants are stored.
Every other tile of side A2^-1 belongs to the decomposition implicitly; it
carries no data and its class is ``OTHER``.

Squares are stored column-wise (numpy arrays indexed by square id) and
looked up level by level through sorted integer keys.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import Config
from .geometry import DyadicSquare, PointIndex, in_box
from .sigma import PALPTable

OTHER, EMPTY_SMALL, SHARP_ONLY, SHARPSHARP = 0, 1, 2, 3
CLASS_NAMES = {OTHER: "other", EMPTY_SMALL: "empty_small", SHARP_ONLY: "sharp_only",
               SHARPSHARP: "sharpsharp"}


class CZBuildError(RuntimeError):
    pass


@dataclass(frozen=True)
class CZSquare:
    """Read-only view of one square of the decomposition (id -1: implicit tile)."""

    id: int
    square: DyadicSquare
    cls: int
    rep: int | None
    rep_in_5q: bool
    u_q: np.ndarray | None
    u_q_perp: np.ndarray | None
    x_sharp: np.ndarray
    mu_target: int | None

    @property
    def class_name(self) -> str:
        return CLASS_NAMES[self.cls]

    @property
    def side(self) -> float:
        return self.square.side

    @property
    def is_sharp(self) -> bool:
        return self.cls >= SHARP_ONLY


class _LevelTable:
    """Sorted keys of (i, j) pairs on one level, mapping to a payload."""

    def __init__(self, i: np.ndarray, j: np.ndarray, payload: np.ndarray):
        self.ibase = int(i.min()) - 2 if i.size else 0
        self.jbase = int(j.min()) - 2 if j.size else 0
        self.width = (int(j.max()) - self.jbase + 3) if j.size else 1
        height = (int(i.max()) - self.ibase + 3) if i.size else 1
        self.exact = height * self.width < 2 ** 62
        if self.exact:
            keys = (i.astype(np.int64) - self.ibase) * self.width + (j.astype(np.int64) - self.jbase)
            order = np.argsort(keys, kind="stable")
            self.keys = keys[order]
            self.payload = payload[order]
        else:  # very deep trees: fall back to a dictionary
            self.map = {(int(a), int(b)): int(p) for a, b, p in zip(i, j, payload)}

    def lookup(self, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        i = np.asarray(i, dtype=np.int64)
        j = np.asarray(j, dtype=np.int64)
        if not self.exact:
            return np.array([self.map.get((int(a), int(b)), -1) for a, b in zip(i, j)], dtype=np.int64)
        out = np.full(i.shape, -1, dtype=np.int64)
        ii = i - self.ibase
        jj = j - self.jbase
        ok = (ii >= 0) & (jj >= 0) & (jj < self.width)
        if not ok.any() or self.keys.size == 0:
            return out
        keys = ii[ok] * self.width + jj[ok]
        pos = np.searchsorted(self.keys, keys)
        pos = np.minimum(pos, self.keys.size - 1)
        hit = self.keys[pos] == keys
        res = np.full(keys.shape, -1, dtype=np.int64)
        res[hit] = self.payload[pos[hit]]
        out[ok] = res
        return out


def _perp_of(u: np.ndarray) -> np.ndarray:
    """Rotate so that det[u_perp, u] = +1."""
    return np.stack([u[..., 1], -u[..., 0]], axis=-1)


class CZDecomposition:
    def __init__(self, index: PointIndex, palps: PALPTable, config: Config):
        self.index = index
        self.palps = palps
        self.config = config
        self.kc = int(round(math.log2(config.cutoff)))
        self._build()

    # ------------------------------------------------------------------ build

    def _ok(self, k: int, count, dmin):
        return (count <= 1) | (dmin >= self.config.A1 * 2.0 ** k)

    def _build(self):
        cfg = self.config
        idx = self.index
        pts = idx.points
        diam_tab = idx.value_table(self.palps.diameter)
        side = 2.0 ** self.kc
        tiles = np.floor(pts / side).astype(np.int64)
        offs = np.array([(a, b) for a in range(-2, 3) for b in range(-2, 3)], dtype=np.int64)
        cand = (tiles[:, None, :] + offs[None, :, :]).reshape(-1, 2)
        cand = np.unique(cand, axis=0)
        if len(pts) > 1:
            gaps, _ = idx.kd.query(pts, k=2)
            min_sep = float(np.min(gaps[:, 1]))
        else:
            min_sep = side
        k_floor = int(math.floor(math.log2(min_sep))) - 10

        Ks, Is, Js, C5, L5 = [], [], [], [], []
        split_tables: dict[int, _LevelTable] = {}
        k = self.kc
        I, J = cand[:, 0], cand[:, 1]
        while I.size:
            if k < k_floor:
                raise CZBuildError(
                    f"subdivision reached side 2^{k} without terminating; "
                    "check for nearly coincident points or raise A1")
            count, lexmin, dmin = idx.block_stats(k, I, J, 2, values=diam_tab, empty=np.inf)
            ok = self._ok(k, count, dmin)
            Ks.append(np.full(int(ok.sum()), k, dtype=np.int64))
            Is.append(I[ok])
            Js.append(J[ok])
            C5.append(count[ok])
            L5.append(lexmin[ok])
            bad = ~ok
            split_tables[k] = _LevelTable(I[bad], J[bad], np.zeros(int(bad.sum()), dtype=np.int64))
            bi, bj = I[bad], J[bad]
            I = np.concatenate([2 * bi, 2 * bi + 1, 2 * bi, 2 * bi + 1])
            J = np.concatenate([2 * bj, 2 * bj, 2 * bj + 1, 2 * bj + 1])
            k -= 1
        self.k_min = k + 1
        self.K = np.concatenate(Ks)
        self.I = np.concatenate(Is)
        self.J = np.concatenate(Js)
        count5 = np.concatenate(C5)
        lex5 = np.concatenate(L5)
        order = np.lexsort((self.J, self.I, -self.K))
        self.K, self.I, self.J = self.K[order], self.I[order], self.J[order]
        count5, lex5 = count5[order], lex5[order]
        self.split = split_tables
        self.leaves: dict[int, _LevelTable] = {}
        for kk in np.unique(self.K):
            sel = np.flatnonzero(self.K == kk)
            self.leaves[int(kk)] = _LevelTable(self.I[sel], self.J[sel], sel)
        n_sq = self.K.size
        self.side = np.ldexp(1.0, self.K.astype(np.int32))
        self.center = (np.column_stack([self.I, self.J]) + 0.5) * self.side[:, None]
        self.count5 = count5

        # representatives
        rep = np.full(n_sq, -1, dtype=np.int64)
        has5 = count5 > 0
        rep[has5] = idx.lex_order[lex5[has5]]
        self.rep_in5 = has5.copy()
        far = np.flatnonzero(~has5)
        if far.size:
            rep[far] = idx.nearest_in_boxes(self.center[far], 12.5 * self.side[far])
        self.rep = rep

        # classes
        cls = np.full(n_sq, OTHER, dtype=np.int8)
        small = self.side < cfg.cutoff
        cls[(~has5) & small] = EMPTY_SMALL
        cls[has5] = SHARP_ONLY
        sh = np.flatnonzero(has5)
        half = 0.5 * (1.0 + cfg.c_G) * self.side[sh]
        near = idx.nearest_in_boxes(self.center[sh], half)
        cls[sh[near >= 0]] = SHARPSHARP
        self.cls = cls

        # directions
        uq = np.full((n_sq, 2), np.nan)
        uq[sh] = self.palps.u_max[rep[sh]]
        self.u_q = uq
        self.u_q_perp = _perp_of(uq)

        self._compute_x_sharp()
        self._compute_mu()
        self._compute_projections()

    def _compute_x_sharp(self):
        cfg = self.config
        xs = self.center.copy()
        sh = np.flatnonzero(self.cls >= SHARP_ONLY)
        if sh.size:
            x0 = self.index.points[self.rep[sh]]
            w = self.center[sh] - x0
            nw = np.hypot(w[:, 0], w[:, 1])
            along = np.abs(np.einsum("ij,ij->i", w, self.u_q_perp[sh]))
            across = np.abs(np.einsum("ij,ij->i", w, self.u_q[sh]))
            beta = np.arctan2(across, along)  # angle from the data line
            alpha = math.asin(min(1.0, cfg.slab_C / cfg.A1))
            dist = np.where(beta <= alpha, 0.0, nw * np.sin(np.minimum(beta - alpha, np.pi / 2)))
            move = dist < self.side[sh] / 1024.0
            xs[sh[move]] = self.center[sh[move]] + 0.25 * self.side[sh[move], None] * self.u_q[sh[move]]
        # verify, and repair by a lattice search where the rule falls short
        dist_e, _ = self.index.kd.query(xs)
        need = np.flatnonzero(dist_e < cfg.c0 * self.side)
        self.x_sharp_repaired = need.size
        if need.size:
            g = (np.arange(16) + 0.5) / 16.0
            lat = np.stack(np.meshgrid(g, g, indexing="ij"), -1).reshape(-1, 2)
            for s in need:
                cand = (np.array([self.I[s], self.J[s]]) + lat) * self.side[s]
                dd, _ = self.index.kd.query(cand)
                best = int(np.argmax(dd))
                if dd[best] < cfg.c0 * self.side[s]:
                    raise CZBuildError(f"no point of square {s} is {cfg.c0} * side away from E")
                xs[s] = cand[best]
        self.x_sharp = xs

    def _compute_mu(self):
        mu = np.full(self.K.size, -1, dtype=np.int64)
        emp = np.flatnonzero(self.cls == EMPTY_SMALL)
        if emp.size:
            reps = self.rep[emp]
            if np.any(reps < 0):
                raise CZBuildError("an empty small square has no data in its 25-fold dilation")
            uniq, inv = np.unique(reps, return_inverse=True)
            ptr, ids = self.lambda_ids_many(self.index.points[uniq])
            first = np.full(uniq.size, -1, dtype=np.int64)
            for u in range(uniq.size):
                members = ids[ptr[u]:ptr[u + 1]]
                members = members[members >= 0]
                if members.size:
                    first[u] = members.min()
            mu[emp] = first[inv]
            if np.any(mu[emp] < 0):
                raise CZBuildError("relay target missing for an empty square")
        self.mu = mu

    def _compute_projections(self):
        cfg = self.config
        ss = np.flatnonzero(self.cls == SHARPSHARP)
        half = 0.5 * (1.0 + cfg.c_G) * self.side[ss]
        lists = self.index.kd.query_ball_point(self.center[ss], half, p=np.inf)
        ptr = np.zeros(self.K.size + 1, dtype=np.int64)
        members: list[np.ndarray] = [np.zeros(0, dtype=np.int64)] * self.K.size
        vals: list[np.ndarray] = [np.zeros(0)] * self.K.size
        self.coincident = []
        for s, lst in zip(ss, lists):
            cand = np.asarray(lst, dtype=np.int64)
            lo = self.center[s] - 0.5 * (1.0 + cfg.c_G) * self.side[s]
            hi = self.center[s] + 0.5 * (1.0 + cfg.c_G) * self.side[s]
            cand = cand[in_box(self.index.points[cand], lo, hi)]
            proj = (self.index.points[cand] - self.index.points[self.rep[s]]) @ self.u_q_perp[s]
            order = np.lexsort((self.index.lex_rank[cand], proj))
            cand, proj = cand[order], proj[order]
            if proj.size > 1 and np.any(np.diff(proj) <= 0):
                self.coincident.append(int(s))
            members[s] = cand
            vals[s] = proj
        counts = np.array([m.size for m in members], dtype=np.int64)
        ptr[1:] = np.cumsum(counts)
        self.proj_ptr = ptr
        self.proj_idx = np.concatenate(members) if members else np.zeros(0, np.int64)
        self.proj_val = np.concatenate(vals) if vals else np.zeros(0)
        if self.coincident:
            raise CZBuildError(
                f"{len(self.coincident)} square(s) have data points with equal abscissas after "
                "straightening; the data is not graph-like at this scale, raise A1")

    # ---------------------------------------------------------------- queries

    def __len__(self) -> int:
        return int(self.K.size)

    def sorted_projections(self, s: int) -> tuple[np.ndarray, np.ndarray]:
        """(point indices, abscissas) of E in (1+c_G)Q, sorted by abscissa."""
        a, b = self.proj_ptr[s], self.proj_ptr[s + 1]
        return self.proj_idx[a:b], self.proj_val[a:b]

    def dyadic(self, s: int) -> DyadicSquare:
        return DyadicSquare(int(self.K[s]), int(self.I[s]), int(self.J[s]))

    def square(self, s: int) -> CZSquare:
        sharp = self.cls[s] >= SHARP_ONLY
        return CZSquare(
            id=int(s), square=self.dyadic(s), cls=int(self.cls[s]),
            rep=int(self.rep[s]) if self.rep[s] >= 0 else None,
            rep_in_5q=bool(self.rep_in5[s]),
            u_q=self.u_q[s].copy() if sharp else None,
            u_q_perp=self.u_q_perp[s].copy() if sharp else None,
            x_sharp=self.x_sharp[s].copy(),
            mu_target=int(self.mu[s]) if self.mu[s] >= 0 else None)

    def implicit_square(self, i: int, j: int) -> CZSquare:
        Q = DyadicSquare(self.kc, int(i), int(j))
        return CZSquare(-1, Q, OTHER, None, False, None, None, Q.center, None)

    def lambda_ids_many(self, X: np.ndarray):
        """Squares whose (1+c_G)-dilation contains each query point.

        Returns CSR arrays (ptr, ids); implicit tiles appear as
        ``-1 - tile_number`` with the tile recorded in ``self.last_implicit``.
        """
        X = np.asarray(X, dtype=float).reshape(-1, 2)
        m = X.shape[0]
        lam = 1.0 + self.config.c_G
        found_q: list[np.ndarray] = []
        found_s: list[np.ndarray] = []
        implicit: list[tuple[int, int]] = []
        active = np.arange(m)
        k = self.kc
        while active.size and k >= self.k_min:
            side = 2.0 ** k
            x = X[active]
            pad = 0.5 * self.config.c_G * side
            i0 = np.floor((x[:, 0] - pad) / side).astype(np.int64)
            j0 = np.floor((x[:, 1] - pad) / side).astype(np.int64)
            next_active = []
            for di in (0, 1):
                for dj in (0, 1):
                    ci, cj = i0 + di, j0 + dj
                    lo_x = (ci + 0.5 - 0.5 * lam) * side
                    hi_x = (ci + 0.5 + 0.5 * lam) * side
                    lo_y = (cj + 0.5 - 0.5 * lam) * side
                    hi_y = (cj + 0.5 + 0.5 * lam) * side
                    inside = (x[:, 0] >= lo_x) & (x[:, 0] < hi_x) & (x[:, 1] >= lo_y) & (x[:, 1] < hi_y)
                    if di == 1:
                        inside &= ci != i0  # same tile listed twice otherwise
                    if dj == 1:
                        inside &= cj != j0
                    if not inside.any():
                        continue
                    q = active[inside]
                    ci, cj = ci[inside], cj[inside]
                    if k < self.kc:
                        tab = self.split.get(k + 1)
                        par = tab.lookup(ci >> 1, cj >> 1) if tab is not None else np.full(ci.size, -1)
                        keep = par >= 0
                        q, ci, cj = q[keep], ci[keep], cj[keep]
                    leaf = self.leaves.get(k)
                    lid = leaf.lookup(ci, cj) if leaf is not None else np.full(ci.size, -1)
                    is_leaf = lid >= 0
                    found_q.append(q[is_leaf])
                    found_s.append(lid[is_leaf])
                    split_tab = self.split.get(k)
                    spl = split_tab.lookup(ci, cj) >= 0 if split_tab is not None else np.zeros(ci.size, bool)
                    next_active.append(q[spl])
                    if k == self.kc:
                        imp = (~is_leaf) & (~spl)
                        for a, b, qq in zip(ci[imp], cj[imp], q[imp]):
                            implicit.append((int(a), int(b)))
                            found_q.append(np.array([qq]))
                            found_s.append(np.array([-len(implicit)]))
            active = np.unique(np.concatenate(next_active)) if next_active else np.zeros(0, np.int64)
            k -= 1
        self.last_implicit = implicit
        q = np.concatenate(found_q) if found_q else np.zeros(0, np.int64)
        s = np.concatenate(found_s) if found_s else np.zeros(0, np.int64)
        order = np.lexsort((s, q))
        q, s = q[order], s[order]
        ptr = np.zeros(m + 1, dtype=np.int64)
        np.add.at(ptr, q + 1, 1)
        return np.cumsum(ptr), s

    def lambda_of(self, x) -> list[CZSquare]:
        ptr, ids = self.lambda_ids_many(np.asarray(x, dtype=float).reshape(1, 2))
        implicit = self.last_implicit
        out = []
        for s in ids[ptr[0]:ptr[1]]:
            if s >= 0:
                out.append(self.square(int(s)))
            else:
                out.append(self.implicit_square(*implicit[-int(s) - 1]))
        return out

    # --------------------------------------------------------------- checks

    def is_ok(self, Q: DyadicSquare) -> bool:
        if Q.side > self.config.cutoff:
            return False
        count, _, dmin = self.index.block_stats(
            Q.k, np.array([Q.i]), np.array([Q.j]), 2,
            values=self.index.value_table(self.palps.diameter), empty=np.inf)
        return bool(self._ok(Q.k, count, dmin)[0])

    def records(self):
        for s in range(len(self)):
            sq = self.square(s)
            yield {
                "k": sq.square.k, "i": sq.square.i, "j": sq.square.j, "class": sq.class_name,
                "rep": sq.rep,
                "u_q": None if sq.u_q is None else [float(v) for v in sq.u_q],
                "x_sharp": [float(v) for v in sq.x_sharp],
            }


def build_cz(index: PointIndex, palps: PALPTable, config: Config) -> CZDecomposition:
    return CZDecomposition(index, palps, config)


def lambda_of(decomp: CZDecomposition, x) -> list[CZSquare]:
    return decomp.lambda_of(x)
