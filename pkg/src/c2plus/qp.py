"""Quadratic programs with an l1 penalty, and small dense linear programs.

The problem class is

    minimize   b'Qb + q'b + |L b - c|_1 + offset
    subject to B b = b0

(note: no factor 1/2 on the quadratic term).  The production solver is a
Mehrotra interior-point method on the epigraph form, whose Newton systems
collapse to d x d after eliminating the epigraph and slack variables.  Its
answer is then "polished": the rows sitting at a kink of the absolute value
are read off, the resulting equality-constrained quadratic is solved
exactly, and the KKT conditions are checked.  Should the interior point
iteration stall, a relaxed ADMM iteration with the same repeated polishing
takes over.  Without curvature the problem is a linear program and goes to
the simplex code below.  A brute-force
sign-pattern enumeration is kept as an independent reference for small
instances.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import qr

from . import _backend

__all__ = [
    "QuadL1Problem",
    "QPSolution",
    "Reduction",
    "objective_value",
    "eliminate_affine",
    "solve_quad_l1",
    "solve_kkt_enumeration",
    "LPResult",
    "StandardSimplex",
    "solve_lp",
]


@dataclass
class QuadL1Problem:
    Q: np.ndarray
    q: np.ndarray
    L: np.ndarray
    c: np.ndarray
    B: np.ndarray | None = None
    b: np.ndarray | None = None
    offset: float = 0.0

    def __post_init__(self):
        self.Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        d = self.Q.shape[0]
        if self.Q.shape != (d, d):
            raise ValueError("Q must be square")
        self.q = np.zeros(d) if self.q is None else np.asarray(self.q, dtype=float).reshape(d)
        L = np.asarray(self.L, dtype=float)
        self.L = L if (L.ndim == 2 and L.shape[1] == d) else L.reshape(-1, d)
        self.c = np.asarray(self.c, dtype=float).reshape(self.L.shape[0])
        if not np.allclose(self.Q, self.Q.T, rtol=0, atol=1e-12 * (1 + np.abs(self.Q).max(initial=0))):
            raise ValueError("Q must be symmetric")
        self.Q = 0.5 * (self.Q + self.Q.T)
        if d:
            lam_min = float(np.linalg.eigvalsh(self.Q).min())
            if lam_min < -1e-10 * max(1.0, float(np.abs(self.Q).max())):
                raise ValueError(f"Q is not positive semidefinite (eigenvalue {lam_min:g})")
        if self.B is not None:
            B = np.asarray(self.B, dtype=float)
            self.B = B if (B.ndim == 2 and B.shape[1] == d) else B.reshape(-1, d)
            self.b = np.asarray(self.b, dtype=float).reshape(self.B.shape[0])

    @property
    def dim(self) -> int:
        return self.Q.shape[0]


@dataclass
class QPSolution:
    beta: np.ndarray
    objective: float
    status: str  # "optimal", "infeasible", "max_iter" or "unbounded"
    kkt_residual: float
    iterations: int = 0


def objective_value(problem: QuadL1Problem, beta: np.ndarray) -> float:
    beta = np.asarray(beta, dtype=float)
    return float(beta @ problem.Q @ beta + problem.q @ beta
                 + np.abs(problem.L @ beta - problem.c).sum() + problem.offset)


@dataclass
class Reduction:
    """Parametrisation beta = beta0 + N z of the affine constraint set."""

    beta0: np.ndarray
    N: np.ndarray

    def reconstruct(self, z: np.ndarray) -> np.ndarray:
        return self.beta0 + self.N @ np.asarray(z, dtype=float)


def eliminate_affine(problem: QuadL1Problem) -> tuple[QuadL1Problem | None, Reduction]:
    """Remove the equality constraint by a null-space parametrisation.

    Returns ``(None, reduction)`` when the constraint is inconsistent.
    """
    d = problem.dim
    if problem.B is None or problem.B.shape[0] == 0:
        return problem, Reduction(np.zeros(d), np.eye(d))
    B, b = problem.B, problem.b
    U, s, Vt = np.linalg.svd(B, full_matrices=True)
    tol = max(B.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    rank = int((s > tol).sum())
    beta0 = Vt[:rank].T @ ((U[:, :rank].T @ b) / s[:rank])
    if np.linalg.norm(B @ beta0 - b) > 1e-9 * (1.0 + np.linalg.norm(b)):
        return None, Reduction(beta0, np.zeros((d, 0)))
    N = Vt[rank:].T
    Qr = N.T @ problem.Q @ N
    reduced = QuadL1Problem(
        Q=0.5 * (Qr + Qr.T),
        q=N.T @ (problem.q + 2.0 * problem.Q @ beta0),
        L=problem.L @ N,
        c=problem.c - problem.L @ beta0,
        offset=problem.offset + float(beta0 @ problem.Q @ beta0 + problem.q @ beta0),
    )
    return reduced, Reduction(beta0, N)


# ---------------------------------------------------------------------------
# exact solve of one sign pattern


def _pattern_solve(Q, q, L, c, zero_rows, signs, Beq=None, beq=None):
    """Stationary point with rows ``zero_rows`` at their kink and the other
    rows carrying fixed signs.  Returns (z, lam, residual) or None.

    Redundant kink rows are common (many pairwise terms vanish together), so
    the system is solved over a pivoted-QR basis of the constraint rows and
    the multipliers are recovered afterwards as the least-norm solution.
    """
    d = Q.shape[0]
    other = ~zero_rows
    lin = q + L[other].T @ signs[other]
    nz = int(zero_rows.sum())
    A = L[zero_rows]
    rhs_c = c[zero_rows]
    if Beq is not None and Beq.shape[0]:
        A = np.vstack([A, Beq])
        rhs_c = np.concatenate([rhs_c, beq])
    k = A.shape[0]
    if k:
        _, R, piv = qr(A.T, mode="economic", pivoting=True)
        diag = np.abs(np.diag(R))
        rank = int(np.sum(diag > 1e-11 * max(diag[0], 1e-300))) if diag.size else 0
        keep = np.sort(piv[:rank])
    else:
        keep = np.zeros(0, dtype=np.int64)
    Ak = A[keep]
    r = Ak.shape[0]
    K = np.zeros((d + r, d + r))
    K[:d, :d] = 2.0 * Q
    K[:d, d:] = Ak.T
    K[d:, :d] = Ak
    rhs = np.concatenate([-lin, rhs_c[keep]])
    try:
        sol = np.linalg.solve(K, rhs)
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
    if not np.all(np.isfinite(sol)):
        return None
    z = sol[:d]
    resid = float(np.max(np.abs(K @ sol - rhs), initial=0.0))
    if k:
        # dropped rows must hold too, and every multiplier is refit jointly
        resid = max(resid, float(np.max(np.abs(A @ z - rhs_c))))
        g = -(2.0 * Q @ z + lin)
        mult = np.linalg.lstsq(A.T, g, rcond=None)[0]
        resid = max(resid, float(np.max(np.abs(A.T @ mult - g))))
    else:
        mult = np.zeros(0)
        resid = max(resid, float(np.max(np.abs(2.0 * Q @ z + lin), initial=0.0)))
    return z, mult[:nz], resid


def _check_kkt(Q, q, L, c, z, lam, zero_rows, signs, resid, tol):
    scale = 1.0 + float(np.max(np.abs(q), initial=0.0)) + float(np.max(np.abs(L), initial=0.0)) * (
        1.0 + float(np.max(np.abs(z), initial=0.0))) + float(np.max(np.abs(c), initial=0.0))
    if resid > tol * scale:
        return False
    r = L @ z - c
    other = ~zero_rows
    if np.any(signs[other] * r[other] < -tol * scale):
        return False
    if lam.size and np.max(np.abs(lam)) > 1.0 + 1e-9:
        return False
    return True


def _polish(Q, q, L, c, w, tol, max_rounds=30):
    """Active-set refinement starting from the kink pattern of ``w``."""
    m = L.shape[0]
    zero_rows = w == 0.0
    signs = np.where(w > 0, 1.0, -1.0)
    seen = set()
    for _ in range(max_rounds):
        key = (zero_rows.tobytes(), signs.tobytes())
        if key in seen:
            return None
        seen.add(key)
        out = _pattern_solve(Q, q, L, c, zero_rows, signs)
        if out is None:
            return None
        z, lam, resid = out
        if _check_kkt(Q, q, L, c, z, lam, zero_rows, signs, resid, tol):
            return z, resid
        r = L @ z - c
        scale = 1.0 + float(np.max(np.abs(r), initial=0.0))
        crossing = (~zero_rows) & (signs * r < -tol * scale)
        if crossing.any():
            zero_rows = zero_rows | crossing
            continue
        idx = np.flatnonzero(zero_rows)
        bad = np.abs(lam) > 1.0 + 1e-9
        if not bad.any():
            return None
        zero_rows = zero_rows.copy()
        zero_rows[idx[bad]] = False
        signs = signs.copy()
        signs[idx[bad]] = np.sign(lam[bad])
    return None


def _csr(L):
    mask = L != 0.0
    counts = mask.sum(axis=1)
    indptr = np.zeros(L.shape[0] + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    rows, cols = np.nonzero(mask)
    return indptr, cols.astype(np.int64), np.ascontiguousarray(L[rows, cols])


def _descent_ray(Q, q, L):
    """A direction v with Qv = 0 along which the objective decreases
    without bound, or None.  Only a singular Q can admit one."""
    lam, vec = np.linalg.eigh(Q)
    top = float(np.abs(lam).max(initial=0.0))
    null = vec[:, np.abs(lam) <= 1e-12 * max(top, 1e-300)]
    k = null.shape[1]
    if k == 0:
        return None
    m = L.shape[0]
    LN = L @ null
    # min (N'q)'w + sum t   with  |LN w| <= t,  |w| <= 1
    G = np.block([[LN, -np.eye(m)], [-LN, -np.eye(m)],
                  [np.eye(k), np.zeros((k, m))], [-np.eye(k), np.zeros((k, m))]])
    h = np.concatenate([np.zeros(2 * m), np.ones(2 * k)])
    lp = solve_lp(np.concatenate([-(null.T @ q), -np.ones(m)]), G, h)
    if lp.status == "optimal" and -lp.value < -1e-9 * (1.0 + float(np.abs(q).max(initial=0.0))):
        return null @ lp.z[:k]
    return None


def solve_quad_l1(problem: QuadL1Problem, tol: float = 1e-6, max_iter: int = 100_000,
                  polish: bool = True) -> QPSolution:
    """Minimise the problem; see the module docstring for the method.

    With ``polish=False`` the interior-point answer (relative accuracy about
    1e-9) is returned without the exact active-set refinement.
    """
    reduced, red = eliminate_affine(problem)
    if reduced is None:
        return QPSolution(red.beta0, math.inf, "infeasible", math.inf)
    # Rows of L that vanish identically contribute a constant.
    norms = np.linalg.norm(reduced.L, axis=1)
    live = norms > 0.0
    offset = reduced.offset + float(np.abs(reduced.c[~live]).sum())
    L = reduced.L[live]
    c = reduced.c[live]
    Q, q = reduced.Q, reduced.q
    d = Q.shape[0]

    def finish(z, status, resid, iters):
        beta = red.reconstruct(z)
        return QPSolution(beta, objective_value(problem, beta), status, float(resid), iters)

    if d == 0:
        return finish(np.zeros(0), "optimal", 0.0, 0)
    if L.shape[0] == 0:
        z = np.linalg.lstsq(2.0 * Q, -q, rcond=None)[0]
        resid = float(np.max(np.abs(2.0 * Q @ z + q)))
        if resid > 1e-9 * (1.0 + np.abs(q).max()):
            return finish(z, "unbounded", resid, 0)
        return finish(z, "optimal", resid, 0)

    if not Q.any():
        # no curvature: min q'z + |Lz - c|_1 is a linear program
        m0 = L.shape[0]
        G = np.block([[L, -np.eye(m0)], [-L, -np.eye(m0)]])
        lp = solve_lp(np.concatenate([-q, -np.ones(m0)]), G, np.concatenate([c, -c]))
        if lp.status == "unbounded":
            return finish(lp.z[:d], "unbounded", math.inf, lp.pivots)
        if lp.status != "optimal":
            return finish(lp.z[:d], "max_iter", math.inf, lp.pivots)
        return finish(lp.z[:d], "optimal", 0.0, lp.pivots)

    ray = _descent_ray(Q, q, L)
    if ray is not None:
        return finish(ray, "unbounded", math.inf, 0)

    kern = _backend.kernels
    indptr, indices, data = _csr(L)
    status, z, iters = kern.ipm_quad_l1(np.ascontiguousarray(Q), np.ascontiguousarray(q, dtype=float),
                                        indptr, indices, data, np.ascontiguousarray(c), 1e-11, 200)
    if status == 0:
        z = np.asarray(z)
        if polish:
            r = L @ z - c
            kink = np.abs(r) <= 1e-7 * (1.0 + np.abs(c).max(initial=0.0))
            signs = np.where(r > 0, 1.0, -1.0)
            out = _pattern_solve(Q, q, L, c, kink, signs)
            if out is not None and _check_kkt(Q, q, L, c, out[0], out[1], kink, signs, out[2], 1e-9):
                if objective_value(reduced, out[0]) <= objective_value(reduced, z) + 1e-12 * (
                        1.0 + abs(objective_value(reduced, z))):
                    return finish(out[0], "optimal", out[2], iters)
        return finish(z, "optimal", 1e-11, iters)

    wt = np.linalg.norm(L, axis=1)
    Lh = L / wt[:, None]
    ch = c / wt
    indptr, indices, data = _csr(Lh)
    m = Lh.shape[0]
    sigma = 1e-6
    alpha = 1.6
    rho = 1.0
    z = np.zeros(d)
    w = np.zeros(m)
    u = np.zeros(m)
    LtL = Lh.T @ Lh

    def factor(r):
        K = 2.0 * Q + sigma * np.eye(d) + r * LtL
        try:
            return np.ascontiguousarray(np.linalg.cholesky(K))
        except np.linalg.LinAlgError:
            return np.ascontiguousarray(np.linalg.cholesky(K + 1e-10 * np.trace(K) / d * np.eye(d)))

    Lc = factor(rho)
    chunk = 25
    next_polish = 25
    it = 0
    eps_abs = tol * 1e-3
    resid = math.inf
    while it < max_iter:
        n = min(chunk, max_iter - it)
        rp, rd, sp, sd = kern.admm_sweeps(Lc, Q, q, indptr, indices, data, ch, wt, z, w, u,
                                          rho, sigma, alpha, n)
        it += n
        converged = rp <= eps_abs + tol * sp and rd <= eps_abs + tol * sd
        if converged or it >= next_polish:
            next_polish *= 2
            pol = _polish(Q, q, L, c, w, tol=1e-9)
            if pol is not None:
                return finish(pol[0], "optimal", pol[1], it)
        if converged:
            return finish(z.copy(), "optimal", max(rp, rd), it)
        resid = max(rp, rd)
        if not np.all(np.isfinite(z)) or np.max(np.abs(z)) > 1e150:
            return finish(z, "unbounded", math.inf, it)
        # residual balancing
        pr = rp / max(sp, 1e-300)
        dr = rd / max(sd, 1e-300)
        if pr > 0 and dr > 0:
            ratio = math.sqrt(pr / dr)
            if ratio > 5.0 or ratio < 0.2:
                new_rho = min(max(rho * ratio, 1e-8), 1e8)
                u *= rho / new_rho
                rho = new_rho
                Lc = factor(rho)
    return finish(z.copy(), "max_iter", resid, it)


def solve_kkt_enumeration(problem: QuadL1Problem, d_max: int = 8, m_max: int = 8) -> QPSolution:
    """Exact minimiser by enumerating, for every l1 row, whether it is
    positive, negative or at its kink, and solving each resulting
    equality-constrained stationarity system."""
    d = problem.dim
    if d > d_max:
        raise ValueError(f"dimension {d} exceeds enumeration limit {d_max}")
    L, c = problem.L, problem.c
    live = np.linalg.norm(L, axis=1) > 0
    L, c = L[live], c[live]
    m = L.shape[0]
    if m > m_max:
        raise ValueError(f"{m} l1 rows exceed enumeration limit {m_max}")
    Beq = problem.B if problem.B is not None else np.zeros((0, d))
    beq = problem.b if problem.b is not None else np.zeros(0)
    best = None
    for pattern in itertools.product((1.0, -1.0, 0.0), repeat=m):
        pat = np.array(pattern)
        zero_rows = pat == 0.0
        out = _pattern_solve(problem.Q, problem.q, L, c, zero_rows, pat, Beq, beq)
        if out is None:
            continue
        z, lam, resid = out
        if Beq.shape[0] and np.max(np.abs(Beq @ z - beq)) > 1e-9 * (1 + np.abs(beq).max()):
            continue
        if not _check_kkt(problem.Q, problem.q, L, c, z, lam, zero_rows, pat, resid, 1e-9):
            continue
        obj = objective_value(problem, z)
        if best is None or obj < best[1]:
            best = (z, obj, resid)
    if best is None:
        # a convex piecewise quadratic that is bounded below attains its
        # minimum, so with consistent constraints the problem is unbounded
        if Beq.shape[0]:
            z0 = np.linalg.lstsq(Beq, beq, rcond=None)[0]
            if np.max(np.abs(Beq @ z0 - beq)) > 1e-9 * (1 + np.abs(beq).max()):
                return QPSolution(np.zeros(d), math.inf, "infeasible", math.inf)
        return QPSolution(np.zeros(d), -math.inf, "unbounded", math.inf)
    return QPSolution(best[0], best[1], "optimal", best[2])


# ---------------------------------------------------------------------------
# linear programming


@dataclass
class LPResult:
    z: np.ndarray
    value: float
    status: str  # "optimal", "infeasible", "unbounded", "max_iter"
    pivots: int = 0


class StandardSimplex:
    """Dense tableau simplex for ``min c'y  s.t.  A y = b, y >= 0``.

    Phase one is run once at construction; afterwards the objective may be
    replaced any number of times and re-optimised from the current basis,
    which stays primal feasible.
    """

    def __init__(self, A: np.ndarray, b: np.ndarray, tol: float = 1e-9,
                 max_iter: int = 50_000, bland: bool = True):
        A = np.array(A, dtype=float)
        b = np.array(b, dtype=float)
        neg = b < 0
        A[neg] *= -1.0
        b[neg] *= -1.0
        m, n = A.shape
        self.n = n
        self.tol = tol
        self.max_iter = max_iter
        self.bland = bland
        self.pivots = 0
        T = np.zeros((m + 1, n + m + 1))
        T[:m, :n] = A
        T[:m, n:n + m] = np.eye(m)
        T[:m, -1] = b
        T[m, :n] = -A.sum(axis=0)
        T[m, -1] = -b.sum()
        basis = np.arange(n, n + m, dtype=np.int64)
        status, piv = _backend.kernels.simplex_pivot_loop(T, basis, n, tol, max_iter, int(bland))
        self.pivots += piv
        if status == 2:
            raise RuntimeError("phase one hit the iteration limit")
        scale = 1.0 + float(np.abs(b).max(initial=0.0))
        self.feasible = -T[m, -1] <= 1e-8 * scale
        keep = []
        for r in range(m):
            if basis[r] >= n:
                nz = np.flatnonzero(np.abs(T[r, :n]) > 1e-9)
                if nz.size == 0:
                    continue  # redundant row
                col = int(nz[0])
                T[r] /= T[r, col]
                for rr in range(m + 1):
                    if rr != r and T[rr, col] != 0.0:
                        T[rr] -= T[rr, col] * T[r]
                basis[r] = col
            keep.append(r)
        rows = np.array(keep, dtype=np.int64)
        self._A = A[rows]
        self._b = b[rows]
        self._start = np.ascontiguousarray(basis[rows])
        self.T = np.zeros((len(rows) + 1, n + 1))
        self.T[:-1, :n] = T[rows, :n]
        self.T[:-1, -1] = T[rows, -1]
        self.basis = np.ascontiguousarray(basis[rows])

    @classmethod
    def from_basis(cls, A: np.ndarray, b: np.ndarray, basis, tol: float = 1e-9,
                   max_iter: int = 50_000, bland: bool = True) -> "StandardSimplex":
        """Skip phase one, starting from a known primal feasible basis.

        ``basis`` lists one column per row; the basis matrix must be
        invertible and ``B^-1 b >= 0``.
        """
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        basis = np.ascontiguousarray(np.asarray(basis, dtype=np.int64))
        m, n = A.shape
        if basis.shape != (m,):
            raise ValueError("need exactly one basic column per row")
        self = cls.__new__(cls)
        self.n, self.tol, self.max_iter, self.bland, self.pivots = n, tol, max_iter, bland, 0
        self._A, self._b, self._start = A.copy(), b.copy(), basis.copy()
        if not self._refactor(basis):
            raise ValueError("starting basis is not primal feasible")
        self.feasible = True
        return self

    def _refactor(self, basis) -> bool:
        """Rebuild the tableau from the original data for ``basis``."""
        A, b = self._A, self._b
        m = A.shape[0]
        try:
            Binv = np.linalg.inv(A[:, basis])
        except np.linalg.LinAlgError:
            return False
        T = np.zeros((m + 1, self.n + 1))
        T[:m, :self.n] = Binv @ A
        T[:m, -1] = Binv @ b
        if np.any(T[:m, -1] < -1e-9 * (1.0 + np.abs(b).max(initial=0.0))):
            return False
        T[:m, -1] = np.maximum(T[:m, -1], 0.0)
        T[:m, basis] = np.eye(m)
        self.T = T
        self.basis = np.ascontiguousarray(np.asarray(basis, dtype=np.int64).copy())
        return True

    def optimize(self, cost: np.ndarray) -> LPResult:
        cost = np.asarray(cost, dtype=float)
        res = self._optimize(cost)
        if res.status != "optimal":
            # rounding drift in the tableau: refactor and retry, first from
            # the current basis, then from the starting one
            base_tol = self.tol
            try:
                for basis, tol in ((self.basis.copy(), base_tol), (self._start, base_tol),
                                   (self._start, 1e3 * base_tol)):
                    self.tol = tol
                    if self._refactor(basis):
                        res = self._optimize(cost)
                        if res.status == "optimal":
                            break
            finally:
                self.tol = base_tol
        return res

    def _optimize(self, cost: np.ndarray) -> LPResult:
        T = self.T
        cb = cost[self.basis]
        T[-1, :self.n] = cost - cb @ T[:-1, :self.n]
        T[-1, -1] = -float(cb @ T[:-1, -1])
        status, piv = _backend.kernels.simplex_pivot_loop(T, self.basis, self.n, self.tol,
                                                          self.max_iter, int(self.bland))
        self.pivots += piv
        y = np.zeros(self.n)
        y[self.basis] = T[:-1, -1]
        name = {0: "optimal", 1: "unbounded", 2: "max_iter"}[status]
        return LPResult(y, float(cost @ y), name, piv)


def solve_lp(c, G=None, h=None, A=None, a=None, tol: float = 1e-9) -> LPResult:
    """Maximise c'z subject to G z <= h and A z = a (z free)."""
    c = np.asarray(c, dtype=float).reshape(-1)
    n = c.size
    G = np.zeros((0, n)) if G is None else np.asarray(G, dtype=float).reshape(-1, n)
    h = np.zeros(0) if h is None else np.asarray(h, dtype=float).reshape(-1)
    A = np.zeros((0, n)) if A is None else np.asarray(A, dtype=float).reshape(-1, n)
    a = np.zeros(0) if a is None else np.asarray(a, dtype=float).reshape(-1)
    mi, me = G.shape[0], A.shape[0]
    # y = (z+, z-, slack)
    Astd = np.zeros((mi + me, 2 * n + mi))
    Astd[:mi, :n] = G
    Astd[:mi, n:2 * n] = -G
    Astd[:mi, 2 * n:] = np.eye(mi)
    Astd[mi:, :n] = A
    Astd[mi:, n:2 * n] = -A
    bstd = np.concatenate([h, a])
    solver = StandardSimplex(Astd, bstd, tol=tol)
    if not solver.feasible:
        return LPResult(np.full(n, np.nan), -math.inf, "infeasible", solver.pivots)
    cost = np.concatenate([-c, c, np.zeros(mi)])
    res = solver.optimize(cost)
    z = res.z[:n] - res.z[n:2 * n]
    if res.status != "optimal":
        return LPResult(z, math.inf if res.status == "unbounded" else float(c @ z), res.status, solver.pivots)
    return LPResult(z, float(c @ z), "optimal", solver.pivots)
