"""Numpy implementations of the compiled kernels in ``_cython/_core.pyx``.

Used when the extension module is unavailable or when the environment
variable ``C2PLUS_PURE=1`` is set.  Results agree with the compiled path up
to floating-point reassociation.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_solve


def simplex_pivot_loop(T, basis, ncols, tol, max_iter, bland_only):
    m = T.shape[0] - 1
    it = 0
    degenerate = 0
    while it < max_iter:
        costs = T[m, :ncols]
        neg = np.flatnonzero(costs < -tol)
        if neg.size == 0:
            return 0, it
        if bland_only or degenerate > 8:
            col = int(neg[0])
        else:
            col = int(neg[np.argmin(costs[neg])])
        colvals = T[:m, col]
        cand = np.flatnonzero(colvals > tol)
        if cand.size == 0:
            return 1, it
        ratios = T[cand, -1] / colvals[cand]
        row = -1
        best = np.inf
        for i, ratio in zip(cand, ratios):
            if row < 0 or ratio < best - 1e-12:
                row, best = int(i), ratio
            elif ratio <= best + 1e-12 and basis[i] < basis[row]:
                row = int(i)
                best = min(best, ratio)
        degenerate = degenerate + 1 if best <= 1e-12 else 0
        T[row] /= T[row, col]
        factors = T[:, col].copy()
        factors[row] = 0.0
        T -= np.outer(factors, T[row])
        T[:, col] = 0.0
        T[row, col] = 1.0
        basis[row] = col
        it += 1
    return 2, it


def admm_sweeps(Lc, Q, q, indptr, indices, data, c, wt, z, w, u, rho, sigma, alpha, n_iter):
    from scipy.sparse import csr_matrix

    m = c.shape[0]
    d = z.shape[0]
    L = csr_matrix((data, indices, indptr), shape=(m, d))
    LT = L.T.tocsr()
    thr = wt / rho
    lz = L @ z
    for _ in range(n_iter):
        rhs = sigma * z - q + LT @ (rho * (w + c - u))
        z[:] = cho_solve((Lc, True), rhs)
        lz = L @ z
        v = alpha * (lz - c) + (1.0 - alpha) * w
        a = v + u
        wnew = np.sign(a) * np.maximum(np.abs(a) - thr, 0.0)
        u[:] = a - wnew
        w[:] = wnew
    rp = float(np.max(np.abs(lz - c - w), initial=0.0))
    sp = float(max(np.max(np.abs(lz), initial=0.0), np.max(np.abs(w), initial=0.0),
                   np.max(np.abs(c), initial=0.0)))
    qz = 2.0 * (Q @ z)
    lty = LT @ (rho * u)
    rd = float(np.max(np.abs(qz + q + lty), initial=0.0))
    sd = float(max(np.max(np.abs(qz), initial=0.0), np.max(np.abs(q), initial=0.0),
                   np.max(np.abs(lty), initial=0.0)))
    return rp, rd, sp, sd


def field_set_costs(pts, vals, grads, set_ptr, members):
    out = np.empty(len(set_ptr) - 1)
    for s in range(len(out)):
        idx = members[set_ptr[s]:set_ptr[s + 1]]
        P, V, G = pts[idx], vals[idx], grads[idx]
        total = float(np.abs(V).sum() + np.abs(G).sum())
        g2 = (G ** 2).sum(axis=1)
        if np.any(V < 0) or np.any((g2 > 0) & (V <= 0)):
            out[s] = np.inf
            continue
        pos = g2 > 0
        total += float((g2[pos] / V[pos]).sum())
        n = len(idx)
        if n > 1:
            ii, jj = np.nonzero(~np.eye(n, dtype=bool))
            diff = P[ii] - P[jj]
            r2 = (diff ** 2).sum(axis=1)
            num = V[ii] - V[jj] - (G[jj] * diff).sum(axis=1)
            total += float((np.abs(num) / r2).sum())
            total += float((np.abs(G[ii] - G[jj]).sum(axis=1) / np.sqrt(r2)).sum())
        out[s] = total
    return out


def pair_union_costs(pts, vals, grads, sx_ptr, sx_idx, ra, rb):
    out = np.empty(len(ra))
    size = np.empty(len(ra), dtype=np.int64)
    for ell, (a, b) in enumerate(zip(ra, rb)):
        parts = [[a], sx_idx[sx_ptr[a]:sx_ptr[a + 1]], [b], sx_idx[sx_ptr[b]:sx_ptr[b + 1]]]
        merged = np.concatenate([np.asarray(p, dtype=np.int64) for p in parts])
        _, first = np.unique(merged, return_index=True)
        members = merged[np.sort(first)]
        size[ell] = members.size
        out[ell] = field_set_costs(pts, vals, grads, np.array([0, members.size]), members)[0]
    return out, size


def _box_gap(lo, hi, v, w):
    gap = np.maximum(0.0, np.maximum(lo[v] - hi[w], lo[w] - hi[v]))
    return float(np.hypot(gap[0], gap[1]))


def wspd_pairs(lo, hi, left, right, kappa):
    diam = np.hypot(hi[:, 0] - lo[:, 0], hi[:, 1] - lo[:, 1])
    out_a, out_b = [], []
    stack = [(int(left[v]), int(right[v])) for v in range(len(left)) if left[v] >= 0]
    while stack:
        v, w = stack.pop()
        dv, dw = diam[v], diam[w]
        if max(dv, dw) <= kappa * _box_gap(lo, hi, v, w):
            out_a.append(v)
            out_b.append(w)
            continue
        if dv < dw or (dv == dw and left[v] < 0):
            v, w = w, v
        stack.append((int(left[v]), w))
        stack.append((int(right[v]), w))
    return np.array(out_a, dtype=np.int64), np.array(out_b, dtype=np.int64)


def ipm_quad_l1(Q, q, indptr, indices, data, c, tol, max_iter):
    """Mehrotra predictor-corrector on  min z'Qz + q'z + sum t,  |Lz - c| <= t.

    The t variables and both slack blocks are eliminated in closed form, so
    every Newton step is one d x d solve.  L comes in CSR form.  Returns
    (status, z, iterations); status 0 converged, 1 failed.
    """
    d = Q.shape[0]
    m = c.shape[0]
    L = np.zeros((m, d))
    rows = np.repeat(np.arange(m), np.diff(indptr))
    np.add.at(L, (rows, indices), data)
    z = np.zeros(d)
    r = -c
    t = np.abs(r) + 1.0
    s1, s2 = t - r, t + r
    y1 = np.full(m, 0.5)
    y2 = np.full(m, 0.5)
    Q2 = 2.0 * Q
    scale = 1.0 + float(np.abs(q).max(initial=0.0)) + float(np.abs(c).max(initial=0.0))
    reg = 1e-13 * (1.0 + float(np.abs(Q2).max(initial=0.0)))

    def direction(rdz, rdt, rp1, rp2, rc1, rc2):
        w1, w2 = y1 / s1, y2 / s2
        a1 = (y1 * rp1 - rc1) / s1
        a2 = (y2 * rp2 - rc2) / s2
        ws = w1 + w2
        D = 4.0 * w1 * w2 / ws
        e = (w1 - w2) * (rdt - a1 - a2) / ws + a1 - a2
        K = Q2 + (L.T * D) @ L
        K[np.diag_indices_from(K)] += reg
        rhs = -rdz - L.T @ e
        try:
            dz = np.linalg.solve(K, rhs)
        except np.linalg.LinAlgError:
            K[np.diag_indices_from(K)] += 1e-10 * (1.0 + float(np.abs(Q2).max(initial=0.0)))
            try:
                dz = np.linalg.solve(K, rhs)
            except np.linalg.LinAlgError:
                return None
        Ldz = L @ dz
        dt = ((w1 - w2) * Ldz - rdt + a1 + a2) / ws
        dy1 = w1 * (Ldz - dt) + a1
        dy2 = w2 * (-Ldz - dt) + a2
        ds1 = (-rc1 - s1 * dy1) / y1
        ds2 = (-rc2 - s2 * dy2) / y2
        return dz, dt, dy1, dy2, ds1, ds2

    def step(v, dv):
        neg = dv < 0
        return min(1.0, float(np.min(-v[neg] / dv[neg]))) if neg.any() else 1.0

    for it in range(max_iter):
        r = L @ z - c
        rdz = Q2 @ z + q + L.T @ (y1 - y2)
        rdt = 1.0 - y1 - y2
        rp1 = s1 - t + r
        rp2 = s2 - t - r
        mu = float(s1 @ y1 + s2 @ y2) / (2 * m)
        res = max(float(np.abs(rdz).max(initial=0.0)), float(np.abs(rdt).max()),
                  float(np.abs(rp1).max()), float(np.abs(rp2).max()))
        if mu < tol * scale and res < tol * scale:
            return 0, z, it
        # predictor
        aff = direction(rdz, rdt, rp1, rp2, s1 * y1, s2 * y2)
        if aff is None:
            return 1, z, it
        _, _, dy1, dy2, ds1, ds2 = aff
        ap = min(step(s1, ds1), step(s2, ds2))
        ad = min(step(y1, dy1), step(y2, dy2))
        mu_aff = float((s1 + ap * ds1) @ (y1 + ad * dy1) + (s2 + ap * ds2) @ (y2 + ad * dy2)) / (2 * m)
        sig = (mu_aff / mu) ** 3 if mu > 0 else 0.0
        # corrector
        rc1 = s1 * y1 + ds1 * dy1 - sig * mu
        rc2 = s2 * y2 + ds2 * dy2 - sig * mu
        cor = direction(rdz, rdt, rp1, rp2, rc1, rc2)
        if cor is None:
            return 1, z, it
        dz, dt, dy1, dy2, ds1, ds2 = cor
        ap = 0.99 * min(step(s1, ds1), step(s2, ds2))
        ad = 0.99 * min(step(y1, dy1), step(y2, dy2))
        ap = min(ap, 1.0)
        ad = min(ad, 1.0)
        z = z + ap * dz
        t = t + ap * dt
        s1 = s1 + ap * ds1
        s2 = s2 + ap * ds2
        y1 = y1 + ad * dy1
        y2 = y2 + ad * dy2
        if not np.all(np.isfinite(z)) or np.abs(z).max(initial=0.0) > 1e150:
            return 1, z, it
    return 1, z, max_iter



def gauge_sweep(T, basis, gx, dirs, tol, max_iter):
    m = T.shape[0] - 1
    n = T.shape[1] - 1
    W = np.zeros(dirs.shape[0])
    status = np.zeros(dirs.shape[0], dtype=np.int64)
    bases = np.zeros((dirs.shape[0], m), dtype=np.int64)
    vals = np.zeros((dirs.shape[0], m))
    for s, u in enumerate(dirs):
        coef = gx @ u
        cost = np.concatenate([-coef, coef, np.zeros(n - 2 * coef.size)])
        T[m, :n] = cost - cost[basis] @ T[:m, :n]
        T[m, n] = -float(cost[basis] @ T[:m, n])
        status[s], _ = simplex_pivot_loop(T, basis, n, tol, max_iter, 0)
        W[s] = -float(cost[basis] @ T[:m, n])
        bases[s] = basis
        vals[s] = T[:m, n]
    return W, status, bases, vals
