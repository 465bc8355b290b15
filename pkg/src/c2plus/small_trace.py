"""Order-of-magnitude trace norms on small point sets.

For a finite set S with data f >= 0, the quantity

    inf { Q(P) + M(P) : P a Whitney field on S with P^x(x) = f(x) }

is comparable to the smallest C^2 norm of a nonnegative extension of f.
Here Q is the sum of every single-point and pairwise difference term and
M = sum |grad P^x|^2 / P^x(x).  Fixing the values turns this into a convex
quadratic with an l1 penalty in the free gradients, solved by `c2plus.qp`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .jets import WhitneyField, m_functional, q_functional
from .qp import QPSolution, QuadL1Problem, solve_quad_l1


@dataclass
class SmallTraceInstance:
    """Points ``S`` with data ``f``; optional ``pin`` carries a forced zero jet."""

    S: np.ndarray
    f: np.ndarray
    pin: np.ndarray | None = None

    def __post_init__(self):
        self.S = np.asarray(self.S, dtype=float).reshape(-1, 2)
        self.f = np.asarray(self.f, dtype=float).reshape(-1)
        if self.f.shape[0] != self.S.shape[0]:
            raise ValueError("S and f have different lengths")
        if np.any(self.f < 0) or not np.all(np.isfinite(self.f)):
            raise ValueError("data must be finite and nonnegative")
        if len({tuple(p) for p in self.S.tolist()}) != len(self.S):
            raise ValueError("duplicate points in S")
        if self.pin is not None:
            self.pin = np.asarray(self.pin, dtype=float).reshape(2)
            if np.any(np.all(self.S == self.pin, axis=1)):
                raise ValueError("pinned point must not belong to S")


@dataclass
class TraceEstimate:
    value: float
    minimizer: WhitneyField
    solution: QPSolution | None = field(default=None, repr=False)


@dataclass
class VariableMap:
    """Where each free variable sits: ``owner[k]`` is the point index and
    ``axis[k]`` the gradient component of variable k."""

    points: np.ndarray
    values: np.ndarray
    owner: np.ndarray
    axis: np.ndarray

    def field(self, beta: np.ndarray) -> WhitneyField:
        grads = np.zeros((len(self.points), 2))
        grads[self.owner, self.axis] = beta
        return WhitneyField.from_arrays(self.points, self.values, grads)


def assemble_quad_l1(inst: SmallTraceInstance) -> tuple[QuadL1Problem, VariableMap]:
    """Exact reformulation: |L b - c|_1 + offset reproduces Q, and b'Qb
    reproduces M, for every field with the prescribed values."""
    pts = inst.S
    vals = inst.f
    if inst.pin is not None:
        pts = np.vstack([pts, inst.pin])
        vals = np.concatenate([vals, [0.0]])
    n = len(pts)
    free = vals > 0
    if inst.pin is not None:
        free[-1] = False
    owner = np.repeat(np.flatnonzero(free), 2)
    axis = np.tile([0, 1], int(free.sum()))
    d = owner.size
    col = -np.ones((n, 2), dtype=np.int64)
    col[owner, axis] = np.arange(d)

    rows_L: list[np.ndarray] = []
    rows_c: list[np.ndarray] = []
    offset = float(np.abs(vals).sum())

    # single-point gradient terms
    if d:
        rows_L.append(np.eye(d))
        rows_c.append(np.zeros(d))

    if n > 1:
        ii, jj = np.nonzero(~np.eye(n, dtype=bool))
        diff = pts[ii] - pts[jj]
        r2 = np.einsum("ij,ij->i", diff, diff)
        # value terms |f_a - f_b - g_b.(a - b)| / r^2 for ordered (a, b)
        cval = (vals[ii] - vals[jj]) / r2
        has = free[jj]
        offset += float(np.abs(cval[~has]).sum())
        if has.any():
            block = np.zeros((int(has.sum()), d))
            sel = np.flatnonzero(has)
            for ax in (0, 1):
                block[np.arange(sel.size), col[jj[sel], ax]] = diff[sel, ax] / r2[sel]
            rows_L.append(block)
            rows_c.append(cval[sel])
        # gradient terms: each unordered pair appears twice in the ordered sum
        up = ii < jj
        a, b = ii[up], jj[up]
        inv_r = 2.0 / np.sqrt(r2[up])
        for ax in (0, 1):
            ca, cb = col[a, ax], col[b, ax]
            live = (ca >= 0) | (cb >= 0)
            if not live.any():
                continue
            block = np.zeros((int(live.sum()), d))
            k = np.arange(block.shape[0])
            la, lb, w = ca[live], cb[live], inv_r[live]
            block[k[la >= 0], la[la >= 0]] += w[la >= 0]
            block[k[lb >= 0], lb[lb >= 0]] -= w[lb >= 0]
            rows_L.append(block)
            rows_c.append(np.zeros(block.shape[0]))

    L = np.vstack(rows_L) if rows_L else np.zeros((0, d))
    c = np.concatenate(rows_c) if rows_c else np.zeros(0)
    Q = np.zeros((d, d))
    if d:
        Q[np.arange(d), np.arange(d)] = 1.0 / vals[owner]
    problem = QuadL1Problem(Q=Q, q=np.zeros(d), L=L, c=c, offset=offset)
    return problem, VariableMap(pts, vals, owner, axis)


def _minimize(inst: SmallTraceInstance, tol: float, max_iter: int,
              polish: bool = True) -> TraceEstimate:
    problem, vmap = assemble_quad_l1(inst)
    sol = solve_quad_l1(problem, tol=tol, max_iter=max_iter, polish=polish)
    if sol.status in ("infeasible", "unbounded"):
        raise RuntimeError(f"trace minimisation failed: {sol.status}")
    F = vmap.field(sol.beta)
    return TraceEstimate(q_functional(F) + m_functional(F), F, sol)


def small_trace_norm(S, f, max_points: int | None = 24, tol: float = 1e-6,
                     max_iter: int = 100_000, polish: bool = True) -> TraceEstimate:
    inst = SmallTraceInstance(S, f)
    if max_points is not None and len(inst.S) > max_points:
        raise ValueError(f"{len(inst.S)} points exceed the small-set limit {max_points}")
    return _minimize(inst, tol, max_iter, polish)


def m0_minimize(S, f, pin, tol: float = 1e-6, max_iter: int = 100_000) -> TraceEstimate:
    """Best field on S plus the pinned point, whose jet is forced to vanish."""
    return _minimize(SmallTraceInstance(S, f, pin), tol, max_iter)


def m1_minimize(S, f, tol: float = 1e-6, max_iter: int = 100_000,
                polish: bool = True) -> TraceEstimate:
    return _minimize(SmallTraceInstance(S, f), tol, max_iter, polish)
