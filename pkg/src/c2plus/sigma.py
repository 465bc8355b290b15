"""Convex bodies of admissible gradients and their parallelogram summaries.

For a point x of a finite set S, sigma(x, S) is the set of gradients at x of
Whitney fields on S that vanish at every point of S and have Whitney norm at
most 1.  It is a centrally symmetric convex polygon.  Its gauge along a unit
direction u is 1 / W(u), where W(u) is the least Whitney norm of a
vanishing field with gradient u at x.

W(u) is the value of a linear program.  We solve its dual, which has one
equation per free gradient component plus two budget rows, so only u
enters the objective: a single simplex tableau is set up per (x, S) and
re-optimised for every direction, starting from an explicit feasible basis
(no phase one).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .jets import Jet1, jet1_rebase
from . import _backend
from .qp import StandardSimplex


def _field_rows(S: np.ndarray):
    """Absolute-value functionals of the Whitney norm of a vanishing field.

    Returns (rows, kind) where rows acts on the stacked gradients
    (g_0x, g_0y, g_1x, ...) and kind is 0 for single-point terms, 1 for
    cross terms.
    """
    n = len(S)
    d = 2 * n
    single = np.eye(d)
    if n == 1:
        return single, np.zeros(d, dtype=np.int8)
    ii, jj = np.nonzero(~np.eye(n, dtype=bool))
    diff = S[ii] - S[jj]
    r2 = np.einsum("ij,ij->i", diff, diff)
    # value terms: |g_b . (a - b)| / |a - b|^2 for ordered (a, b)
    val = np.zeros((ii.size, d))
    k = np.arange(ii.size)
    val[k, 2 * jj] = diff[:, 0] / r2
    val[k, 2 * jj + 1] = diff[:, 1] / r2
    # gradient terms: |g_a,i - g_b,i| / |a - b| for unordered pairs
    up = ii < jj
    a, b, r = ii[up], jj[up], np.sqrt(r2[up])
    grad = np.zeros((2 * a.size, d))
    k = np.arange(a.size)
    for ax in (0, 1):
        grad[2 * k + ax, 2 * a + ax] = 1.0 / r
        grad[2 * k + ax, 2 * b + ax] = -1.0 / r
    rows = np.vstack([single, val, grad])
    kind = np.concatenate([np.zeros(d, np.int8), np.ones(val.shape[0] + grad.shape[0], np.int8)])
    return rows, kind


class SigmaLP:
    """Reusable gauge oracle for sigma(x, S)."""

    def __init__(self, x, S, tol: float = 1e-9):
        S = np.asarray(S, dtype=float).reshape(-1, 2)
        x = np.asarray(x, dtype=float).reshape(2)
        hit = np.flatnonzero(np.all(S == x, axis=1))
        if hit.size != 1:
            raise ValueError("x must occur exactly once in S")
        if len({tuple(p) for p in S.tolist()}) != len(S):
            raise ValueError("duplicate points in S")
        self.x = x
        self.S = S
        ix = int(hit[0])
        rows, kind = _field_rows(S)
        K = rows.shape[0]
        n = len(S)
        other = np.array([c for c in range(2 * n) if c // 2 != ix], dtype=np.int64)
        m_eq = other.size + 2
        # columns: mu+ (K), mu- (K), slack_single, slack_cross
        A = np.zeros((m_eq, 2 * K + 2))
        A[:other.size, :K] = rows[:, other].T
        A[:other.size, K:2 * K] = -rows[:, other].T
        A[other.size, :K][kind == 0] = 1.0
        A[other.size, K:2 * K][kind == 0] = 1.0
        A[other.size + 1, :K][kind == 1] = 1.0
        A[other.size + 1, K:2 * K][kind == 1] = 1.0
        A[other.size, 2 * K] = 1.0
        A[other.size + 1, 2 * K + 1] = 1.0
        b = np.zeros(m_eq)
        b[-2:] = 1.0
        # Cross terms of close points have entries ~ 1/r^2; rescaling each
        # multiplier column to unit size keeps the tableau well conditioned.
        colscale = np.maximum(1.0, np.abs(rows[:, other]).max(axis=1, initial=0.0))
        A[:, :K] /= colscale
        A[:, K:2 * K] /= colscale
        # single-point columns of the other gradients, plus both slacks
        basis = np.concatenate([other, [2 * K, 2 * K + 1]])
        self._lp = StandardSimplex.from_basis(A, b, basis, tol=tol, bland=False,
                                              max_iter=50 * m_eq + 500)
        self._gx = rows[:, 2 * ix:2 * ix + 2] / colscale[:, None]
        self._K = K
        self._A, self._b = A, b
        self._scale = 1.0 + float(np.abs(A).max())

    def min_norm(self, u) -> float:
        """Least Whitney norm of a vanishing field with gradient ``u`` at x."""
        u = np.asarray(u, dtype=float).reshape(2)
        coef = self._gx @ u
        cost = np.concatenate([-coef, coef, [0.0, 0.0]])
        res = self._lp.optimize(cost)
        if res.status != "optimal":
            raise RuntimeError(f"gauge program ended with status {res.status}")
        return -res.value

    def gauges(self, dirs: np.ndarray) -> np.ndarray:
        """Gauges along many unit directions, re-optimising one tableau.

        Every final basis is a feasible point of the dual program and so a
        vertex v of the planar polygon whose support function is W; W(u) can
        be no smaller than <u, v> for any checked vertex.  Directions that
        break this (rounding drift in the tableau) are solved afresh.
        """
        dirs = np.ascontiguousarray(dirs, dtype=float)
        lp = self._lp
        W, status, bases, vals = _backend.kernels.gauge_sweep(
            lp.T, lp.basis, np.ascontiguousarray(self._gx), dirs, lp.tol, lp.max_iter)
        W = np.array(W, dtype=float)
        nd = dirs.shape[0]
        Y = np.zeros((nd, self._A.shape[1]))
        np.put_along_axis(Y, np.asarray(bases), np.asarray(vals), axis=1)
        K = self._K
        resid = np.abs(Y @ self._A.T - self._b).max(axis=1)
        valid = (resid <= 1e-9 * self._scale) & (Y.min(axis=1) >= -1e-9) & (np.asarray(status) == 0)
        V = (Y[:, :K] - Y[:, K:2 * K]) @ self._gx
        support = dirs @ V[valid].T
        lower = support.max(axis=1) if valid.any() else np.full(nd, -np.inf)
        own = np.einsum("ij,ij->i", dirs, V)
        tol = 1e-9 * np.maximum(1.0, np.abs(W))
        redo = (~valid) | (W < lower - tol) | (np.abs(W - own) > tol)
        for s in np.flatnonzero(redo):
            W[s] = SigmaLP(self.x, self.S, tol=lp.tol).min_norm(dirs[s])
        with np.errstate(divide="ignore"):
            return np.where(W > 0, 1.0 / np.maximum(W, 1e-300), np.inf)

    def gauge(self, u) -> float:
        u = np.asarray(u, dtype=float).reshape(2)
        nrm = float(np.hypot(u[0], u[1]))
        if nrm == 0.0:
            raise ValueError("direction must be nonzero")
        W = self.min_norm(u / nrm)
        return math.inf if W <= 0 else 1.0 / W


def sigma_gauge(x, S, u) -> float:
    return SigmaLP(x, S).gauge(u)


def directions(m_dir: int) -> np.ndarray:
    """``m_dir`` unit vectors at angles k*pi/m_dir, k = 0..m_dir-1."""
    ang = np.pi * np.arange(m_dir) / m_dir
    return np.column_stack([np.cos(ang), np.sin(ang)])


@dataclass(frozen=True)
class SigmaBody:
    anchor: np.ndarray
    dirs: np.ndarray
    gauges: np.ndarray
    u_max: np.ndarray
    diameter: float


def build_sigma_body(x, S, m_dir: int = 64) -> SigmaBody:
    lp = SigmaLP(x, S)
    dirs = directions(m_dir)
    g = lp.gauges(dirs)
    k = int(np.argmax(g))  # first maximiser = smallest angle
    return SigmaBody(np.asarray(x, dtype=float), dirs, g, dirs[k].copy(), 2.0 * float(g[k]))


def _perp(u: np.ndarray) -> np.ndarray:
    return np.array([-u[1], u[0]])


@dataclass(frozen=True)
class PALP:
    """Three functionals on one-jets at ``anchor`` with their tolerances.

    Row 0 reads the gradient along ``u_max``, row 1 along its rotation by
    +90 degrees, row 2 reads the value (tolerance 0).
    """

    anchor: np.ndarray
    functionals: np.ndarray  # 3 x 3 on (value, grad_x, grad_y)
    eps: np.ndarray
    depth_set: np.ndarray
    diameter: float

    @property
    def u_max(self) -> np.ndarray:
        return self.functionals[0, 1:]


def palp_from_body(body: SigmaBody, depth_set, perp_gauge: float) -> PALP:
    u = body.u_max
    F = np.zeros((3, 3))
    F[0, 1:] = u
    F[1, 1:] = _perp(u)
    F[2, 0] = 1.0
    eps = np.array([body.gauges.max(), perp_gauge, 0.0])
    return PALP(body.anchor, F, eps, np.asarray(depth_set, dtype=np.int64), body.diameter)


def build_palp_for(x, S, depth_set, m_dir: int = 64) -> PALP:
    lp = SigmaLP(x, S)
    dirs = directions(m_dir)
    g = lp.gauges(dirs)
    k = int(np.argmax(g))
    body = SigmaBody(np.asarray(x, dtype=float), dirs, g, dirs[k].copy(), 2.0 * float(g[k]))
    return palp_from_body(body, depth_set, lp.gauge(_perp(dirs[k])))


def palp_contains(palp: PALP, P: Jet1, M: float = 1.0) -> bool:
    if tuple(P.base) != tuple(palp.anchor):
        P = jet1_rebase(P, palp.anchor)
    vec = np.array([P.value, P.grad[0], P.grad[1]])
    lam = palp.functionals @ vec
    for li, ei in zip(lam, palp.eps):
        if ei == 0.0:
            if abs(li) > 1e-12:
                return False
        elif abs(li) > M * ei * (1.0 + 1e-12):  # non-strict, up to rounding
            return False
    return True


# ---------------------------------------------------------------------------
# the table for a whole point set


@dataclass
class PALPTable:
    """Per-point summaries for every point of E, stored as arrays."""

    depth: np.ndarray  # N x k indices (padded with -1)
    u_max: np.ndarray  # N x 2
    eps: np.ndarray  # N x 2 (along u_max, along its perpendicular)
    diameter: np.ndarray  # N
    points: np.ndarray

    def __len__(self) -> int:
        return self.diameter.size

    def depth_set(self, i: int) -> np.ndarray:
        row = self.depth[i]
        return row[row >= 0]

    def palp(self, i: int) -> PALP:
        u = self.u_max[i]
        F = np.zeros((3, 3))
        F[0, 1:] = u
        F[1, 1:] = _perp(u)
        F[2, 0] = 1.0
        eps = np.array([self.eps[i, 0], self.eps[i, 1], 0.0])
        return PALP(self.points[i], F, eps, self.depth_set(i), float(self.diameter[i]))


def build_palp(index, i: int, k_depth: int = 16, m_dir: int = 64) -> PALP:
    """Summary at the i-th point of the index from its k nearest neighbours."""
    nb = index.k_nearest_indices(index.points[i], min(k_depth, index.n))
    return build_palp_for(index.points[i], index.points[nb], nb, m_dir)


def build_palp_table(index, k_depth: int = 16, m_dir: int = 64) -> PALPTable:
    n = index.n
    k = min(k_depth, n)
    nbrs = index.knn_all(k)
    depth = np.full((n, k), -1, dtype=np.int64)
    u_max = np.zeros((n, 2))
    eps = np.zeros((n, 2))
    diam = np.zeros(n)
    dirs = directions(m_dir)
    pts = index.points
    for i in range(n):
        nb = nbrs[i]
        lp = SigmaLP(pts[i], pts[nb])
        g = lp.gauges(dirs)
        j = int(np.argmax(g))
        depth[i, :nb.size] = nb
        u_max[i] = dirs[j]
        eps[i] = g[j], lp.gauge(_perp(dirs[j]))
        diam[i] = 2.0 * g[j]
    return PALPTable(depth, u_max, eps, diam, pts)
