# cython: language_level=3
"""Compiled inner loops: simplex pivoting, ADMM sweeps and interior-point
steps for l1-regularised quadratics, batched field costs over many small
point sets, and the pair search of the well-separated decomposition.

Every routine here has a line-for-line numpy counterpart in
``c2plus._pure``; the two are interchangeable.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, INFINITY

cnp.import_array()


def simplex_pivot_loop(double[:, ::1] T, long[::1] basis, int ncols,
                       double tol, long max_iter, int bland_only):
    """Run primal simplex pivots on a tableau in place.

    ``T`` has one row per constraint followed by the reduced-cost row; the
    last column holds the right-hand side.  Only the first ``ncols`` columns
    may enter.  Returns (status, pivots): status 0 optimal, 1 unbounded,
    2 iteration limit.
    """
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t width = T.shape[1]
    cdef Py_ssize_t rhs = width - 1
    cdef Py_ssize_t i, j, r, col, row
    cdef long it = 0
    cdef long degenerate = 0
    cdef double best, ratio, piv, factor, val
    cdef int use_bland
    while it < max_iter:
        use_bland = bland_only or degenerate > 8
        col = -1
        best = -tol
        for j in range(ncols):
            val = T[m, j]
            if val < best:
                col = j
                if use_bland:
                    break
                best = val
        if col < 0:
            return 0, it
        row = -1
        best = INFINITY
        for i in range(m):
            val = T[i, col]
            if val > tol:
                ratio = T[i, rhs] / val
                if row < 0 or ratio < best - 1e-12:
                    row = i
                    best = ratio
                elif ratio <= best + 1e-12 and basis[i] < basis[row]:
                    row = i
                    if ratio < best:
                        best = ratio
        if row < 0:
            return 1, it
        if best <= 1e-12:
            degenerate += 1
        else:
            degenerate = 0
        piv = T[row, col]
        for j in range(width):
            T[row, j] /= piv
        for r in range(m + 1):
            if r == row:
                continue
            factor = T[r, col]
            if factor != 0.0:
                for j in range(width):
                    T[r, j] -= factor * T[row, j]
                T[r, col] = 0.0
        basis[row] = col
        it += 1
    return 2, it


cdef inline void _chol_solve(double[:, ::1] Lc, double* b, Py_ssize_t d) noexcept nogil:
    cdef Py_ssize_t i, k
    cdef double s
    for i in range(d):
        s = b[i]
        for k in range(i):
            s -= Lc[i, k] * b[k]
        b[i] = s / Lc[i, i]
    for i in range(d - 1, -1, -1):
        s = b[i]
        for k in range(i + 1, d):
            s -= Lc[k, i] * b[k]
        b[i] = s / Lc[i, i]


def admm_sweeps(double[:, ::1] Lc, double[:, ::1] Q, double[::1] q,
                long[::1] indptr, long[::1] indices, double[::1] data,
                double[::1] c, double[::1] wt, double[::1] z, double[::1] w, double[::1] u,
                double rho, double sigma, double alpha, long n_iter):
    """Perform ``n_iter`` relaxed ADMM iterations for

        min z'Qz + q'z + sum_i wt_i |L_i z - c_i|

    with the splitting Lz - c = w.  ``Lc`` is the Cholesky factor of
    2Q + sigma*I + rho*L'L.  Arrays z, w, u are updated in place.  Returns
    (primal_residual, dual_residual, scale_primal, scale_dual) of the last
    iterate in the infinity norm.
    """
    cdef Py_ssize_t d = z.shape[0]
    cdef Py_ssize_t m = c.shape[0]
    cdef Py_ssize_t i, k, p
    cdef long it
    cdef double[::1] rhs = np.empty(d)
    cdef double[::1] lz = np.empty(m)
    cdef double[::1] tmp = np.empty(m)
    cdef double[::1] grad = np.empty(d)
    cdef double s, v, thr, inv_rho = 1.0 / rho, wnew
    cdef double rp = 0.0, rd = 0.0, sp = 0.0, sd = 0.0, a, b
    for it in range(n_iter):
        for i in range(m):
            tmp[i] = w[i] + c[i] - u[i]
        for k in range(d):
            rhs[k] = sigma * z[k] - q[k]
        for i in range(m):
            s = rho * tmp[i]
            for p in range(indptr[i], indptr[i + 1]):
                rhs[indices[p]] += data[p] * s
        _chol_solve(Lc, &rhs[0], d)
        for k in range(d):
            z[k] = rhs[k]
        for i in range(m):
            s = 0.0
            for p in range(indptr[i], indptr[i + 1]):
                s += data[p] * z[indices[p]]
            lz[i] = s
            v = alpha * (s - c[i]) + (1.0 - alpha) * w[i]
            a = v + u[i]
            thr = wt[i] * inv_rho
            if a > thr:
                wnew = a - thr
            elif a < -thr:
                wnew = a + thr
            else:
                wnew = 0.0
            u[i] = a - wnew
            w[i] = wnew
    # residuals of the final iterate
    rp = 0.0
    sp = 0.0
    for i in range(m):
        a = fabs(lz[i] - c[i] - w[i])
        if a > rp:
            rp = a
        if fabs(lz[i]) > sp:
            sp = fabs(lz[i])
        if fabs(w[i]) > sp:
            sp = fabs(w[i])
        if fabs(c[i]) > sp:
            sp = fabs(c[i])
    for k in range(d):
        s = q[k]
        v = 0.0
        for p in range(d):
            v += Q[k, p] * z[p]
        grad[k] = s + 2.0 * v
        if fabs(2.0 * v) > sd:
            sd = fabs(2.0 * v)
        if fabs(s) > sd:
            sd = fabs(s)
    for k in range(d):
        rhs[k] = 0.0
    for i in range(m):
        s = rho * u[i]
        for p in range(indptr[i], indptr[i + 1]):
            rhs[indices[p]] += data[p] * s
    rd = 0.0
    for k in range(d):
        a = fabs(grad[k] + rhs[k])
        if a > rd:
            rd = a
        if fabs(rhs[k]) > sd:
            sd = fabs(rhs[k])
    return rp, rd, sp, sd


def field_set_costs(double[:, ::1] pts, double[::1] vals, double[:, ::1] grads,
                    long[::1] set_ptr, long[::1] members):
    """Sum of all single-point and ordered cross terms plus the mass term,
    for every point set listed in CSR form.  Returns an array of costs."""
    cdef Py_ssize_t nsets = set_ptr.shape[0] - 1
    cdef Py_ssize_t s, a, b, ia, ib, lo, hi
    cdef double total, dx, dy, r2, r, num, g2
    cdef double[::1] out = np.empty(nsets)
    for s in range(nsets):
        lo = set_ptr[s]
        hi = set_ptr[s + 1]
        total = 0.0
        for a in range(lo, hi):
            ia = members[a]
            total += fabs(vals[ia]) + fabs(grads[ia, 0]) + fabs(grads[ia, 1])
            g2 = grads[ia, 0] * grads[ia, 0] + grads[ia, 1] * grads[ia, 1]
            if g2 > 0.0:
                if vals[ia] <= 0.0:
                    total = INFINITY
                else:
                    total += g2 / vals[ia]
            elif vals[ia] < 0.0:
                total = INFINITY
            for b in range(lo, hi):
                if b == a:
                    continue
                ib = members[b]
                dx = pts[ia, 0] - pts[ib, 0]
                dy = pts[ia, 1] - pts[ib, 1]
                r2 = dx * dx + dy * dy
                r = sqrt(r2)
                num = vals[ia] - vals[ib] - grads[ib, 0] * dx - grads[ib, 1] * dy
                total += fabs(num) / r2
                total += (fabs(grads[ia, 0] - grads[ib, 0]) + fabs(grads[ia, 1] - grads[ib, 1])) / r
        out[s] = total
    return np.asarray(out)



def pair_union_costs(double[:, ::1] pts, double[::1] vals, double[:, ::1] grads,
                     long[::1] sx_ptr, long[::1] sx_idx, long[::1] ra, long[::1] rb):
    """Field cost and size of {a, b} + S(a) + S(b) for every pair (a, b).

    The per-point sets S(.) are given in CSR form; each union is formed in
    a scratch buffer, so the sets themselves are never stored.
    """
    cdef Py_ssize_t npair = ra.shape[0], n = vals.shape[0]
    cdef Py_ssize_t ell, a, b, ia, ib, m, k, src
    cdef double total, dx, dy, r2, r, g2
    cdef double[::1] out = np.empty(npair)
    cdef long[::1] size = np.empty(npair, dtype=np.int64)
    cdef long[::1] stamp = np.full(n, -1, dtype=np.int64)
    cdef long maxlen = 2
    for a in range(n):
        if sx_ptr[a + 1] - sx_ptr[a] > maxlen:
            maxlen = sx_ptr[a + 1] - sx_ptr[a]
    cdef long[::1] buf = np.empty(2 * maxlen + 2, dtype=np.int64)
    for ell in range(npair):
        m = 0
        for k in range(2):
            src = ra[ell] if k == 0 else rb[ell]
            if stamp[src] != ell:
                stamp[src] = ell
                buf[m] = src
                m += 1
            for a in range(sx_ptr[src], sx_ptr[src + 1]):
                ia = sx_idx[a]
                if stamp[ia] != ell:
                    stamp[ia] = ell
                    buf[m] = ia
                    m += 1
        total = 0.0
        for a in range(m):
            ia = buf[a]
            total += fabs(vals[ia]) + fabs(grads[ia, 0]) + fabs(grads[ia, 1])
            g2 = grads[ia, 0] * grads[ia, 0] + grads[ia, 1] * grads[ia, 1]
            if g2 > 0.0:
                if vals[ia] <= 0.0:
                    total = INFINITY
                else:
                    total += g2 / vals[ia]
            for b in range(a + 1, m):
                ib = buf[b]
                dx = pts[ia, 0] - pts[ib, 0]
                dy = pts[ia, 1] - pts[ib, 1]
                r2 = dx * dx + dy * dy
                r = sqrt(r2)
                total += fabs(vals[ia] - vals[ib] - grads[ib, 0] * dx - grads[ib, 1] * dy) / r2
                total += fabs(vals[ib] - vals[ia] + grads[ia, 0] * dx + grads[ia, 1] * dy) / r2
                total += 2.0 * (fabs(grads[ia, 0] - grads[ib, 0]) + fabs(grads[ia, 1] - grads[ib, 1])) / r
        out[ell] = total
        size[ell] = m
    return np.asarray(out), np.asarray(size)


from libc.stdlib cimport malloc, realloc, free


def wspd_pairs(double[:, ::1] lo, double[:, ::1] hi, long[::1] left, long[::1] right,
               double kappa):
    """Well-separated pairs of a split tree.

    Starts from the two children of every internal node and splits the
    member with the larger bounding box until
    max(diam) <= kappa * dist of the boxes.  Returns (a, b) node arrays,
    one row per unordered pair.
    """
    cdef Py_ssize_t nn = left.shape[0]
    cdef Py_ssize_t cap = 1024, top = 0, ocap = 1024, nout = 0, v, w, t
    cdef long* stack = <long*> malloc(2 * cap * sizeof(long))
    cdef long* outp = <long*> malloc(2 * ocap * sizeof(long))
    cdef double dv, dw, gx, gy, dist, ex, ey
    if stack == NULL or outp == NULL:
        raise MemoryError()
    try:
        for v in range(nn):
            if left[v] >= 0:
                if top + 1 >= cap:
                    cap *= 2
                    stack = <long*> realloc(stack, 2 * cap * sizeof(long))
                stack[2 * top] = left[v]
                stack[2 * top + 1] = right[v]
                top += 1
        while top > 0:
            top -= 1
            v = stack[2 * top]
            w = stack[2 * top + 1]
            ex = hi[v, 0] - lo[v, 0]
            ey = hi[v, 1] - lo[v, 1]
            dv = sqrt(ex * ex + ey * ey)
            ex = hi[w, 0] - lo[w, 0]
            ey = hi[w, 1] - lo[w, 1]
            dw = sqrt(ex * ex + ey * ey)
            gx = lo[v, 0] - hi[w, 0]
            if lo[w, 0] - hi[v, 0] > gx:
                gx = lo[w, 0] - hi[v, 0]
            if gx < 0.0:
                gx = 0.0
            gy = lo[v, 1] - hi[w, 1]
            if lo[w, 1] - hi[v, 1] > gy:
                gy = lo[w, 1] - hi[v, 1]
            if gy < 0.0:
                gy = 0.0
            dist = sqrt(gx * gx + gy * gy)
            if (dv if dv > dw else dw) <= kappa * dist:
                if nout >= ocap:
                    ocap *= 2
                    outp = <long*> realloc(outp, 2 * ocap * sizeof(long))
                    if outp == NULL:
                        raise MemoryError()
                outp[2 * nout] = v
                outp[2 * nout + 1] = w
                nout += 1
                continue
            if dv < dw or (dv == dw and left[v] < 0):
                t = v
                v = w
                w = t
            if top + 2 >= cap:
                cap *= 2
                stack = <long*> realloc(stack, 2 * cap * sizeof(long))
                if stack == NULL:
                    raise MemoryError()
            stack[2 * top] = left[v]
            stack[2 * top + 1] = w
            stack[2 * top + 2] = right[v]
            stack[2 * top + 3] = w
            top += 2
        out = np.empty((nout, 2), dtype=np.int64)
        for t in range(nout):
            out[t, 0] = outp[2 * t]
            out[t, 1] = outp[2 * t + 1]
        return out[:, 0].copy(), out[:, 1].copy()
    finally:
        free(stack)
        free(outp)


cdef int _chol_factor(double[:, ::1] K, double[:, ::1] Lc, Py_ssize_t d) noexcept nogil:
    """Lower Cholesky factor of K into Lc; returns 0 on failure."""
    cdef Py_ssize_t i, j, k
    cdef double s
    for j in range(d):
        s = K[j, j]
        for k in range(j):
            s -= Lc[j, k] * Lc[j, k]
        if not s > 0.0:
            return 0
        Lc[j, j] = sqrt(s)
        for i in range(j + 1, d):
            s = K[i, j]
            for k in range(j):
                s -= Lc[i, k] * Lc[j, k]
            Lc[i, j] = s / Lc[j, j]
    return 1


cdef double _max_step(double* v, double* dv, Py_ssize_t m) noexcept nogil:
    cdef double a = 1.0
    cdef Py_ssize_t i
    for i in range(m):
        if dv[i] < 0.0 and -v[i] / dv[i] < a:
            a = -v[i] / dv[i]
    return a


cdef class _IPMWork:
    cdef public double[::1] s1, s2, y1, y2, t, r, w1, w2, D, e, a1, a2
    cdef public double[::1] dt, dy1, dy2, ds1, ds2, Ldz
    cdef public double[:, ::1] K, Lc

    def __init__(self, Py_ssize_t m, Py_ssize_t d):
        self.s1 = np.empty(m); self.s2 = np.empty(m)
        self.y1 = np.empty(m); self.y2 = np.empty(m)
        self.t = np.empty(m); self.r = np.empty(m)
        self.w1 = np.empty(m); self.w2 = np.empty(m)
        self.D = np.empty(m); self.e = np.empty(m)
        self.a1 = np.empty(m); self.a2 = np.empty(m)
        self.dt = np.empty(m); self.dy1 = np.empty(m); self.dy2 = np.empty(m)
        self.ds1 = np.empty(m); self.ds2 = np.empty(m); self.Ldz = np.empty(m)
        self.K = np.empty((d, d)); self.Lc = np.zeros((d, d))


def ipm_quad_l1(double[:, ::1] Q, double[::1] q, long[::1] indptr, long[::1] indices,
                double[::1] data, double[::1] c, double tol, long max_iter):
    """Mehrotra interior point for  min z'Qz + q'z + |Lz - c|_1  (L in CSR).

    Returns (status, z, iterations); status 0 converged, 1 failed.
    """
    cdef Py_ssize_t d = Q.shape[0]
    cdef Py_ssize_t m = c.shape[0]
    cdef _IPMWork W = _IPMWork(m, d)
    cdef double[::1] z = np.zeros(d)
    cdef double[::1] rdz = np.empty(d)
    cdef double[::1] rhs = np.empty(d)
    cdef double[::1] dz = np.empty(d)
    cdef double[::1] rdt = np.empty(m)
    cdef double[::1] rp1 = np.empty(m)
    cdef double[::1] rp2 = np.empty(m)
    cdef double[::1] rc1 = np.empty(m)
    cdef double[::1] rc2 = np.empty(m)
    cdef Py_ssize_t i, j, k, a, b, it, phase
    cdef double scale, qmax, reg, mu, res, v, ap, ad, mu_aff, sig, ws, acc
    qmax = 0.0
    for i in range(d):
        for j in range(d):
            if fabs(2.0 * Q[i, j]) > qmax:
                qmax = fabs(2.0 * Q[i, j])
    reg = 1e-13 * (1.0 + qmax)
    scale = 1.0
    v = 0.0
    for i in range(d):
        if fabs(q[i]) > v:
            v = fabs(q[i])
    scale += v
    v = 0.0
    for i in range(m):
        if fabs(c[i]) > v:
            v = fabs(c[i])
    scale += v
    for i in range(m):
        W.r[i] = -c[i]
        W.t[i] = fabs(W.r[i]) + 1.0
        W.s1[i] = W.t[i] - W.r[i]
        W.s2[i] = W.t[i] + W.r[i]
        W.y1[i] = 0.5
        W.y2[i] = 0.5
    for it in range(max_iter):
        # residuals
        for i in range(m):
            acc = -c[i]
            for k in range(indptr[i], indptr[i + 1]):
                acc += data[k] * z[indices[k]]
            W.r[i] = acc
        for j in range(d):
            acc = q[j]
            for k in range(d):
                acc += 2.0 * Q[j, k] * z[k]
            rdz[j] = acc
        for i in range(m):
            v = W.y1[i] - W.y2[i]
            for k in range(indptr[i], indptr[i + 1]):
                rdz[indices[k]] += data[k] * v
        mu = 0.0
        res = 0.0
        for j in range(d):
            if fabs(rdz[j]) > res:
                res = fabs(rdz[j])
        for i in range(m):
            rdt[i] = 1.0 - W.y1[i] - W.y2[i]
            rp1[i] = W.s1[i] - W.t[i] + W.r[i]
            rp2[i] = W.s2[i] - W.t[i] - W.r[i]
            mu += W.s1[i] * W.y1[i] + W.s2[i] * W.y2[i]
            if fabs(rdt[i]) > res:
                res = fabs(rdt[i])
            if fabs(rp1[i]) > res:
                res = fabs(rp1[i])
            if fabs(rp2[i]) > res:
                res = fabs(rp2[i])
        mu /= 2.0 * m
        if mu < tol * scale and res < tol * scale:
            return 0, np.asarray(z), it
        # the Schur matrix depends only on the current point
        for i in range(m):
            W.w1[i] = W.y1[i] / W.s1[i]
            W.w2[i] = W.y2[i] / W.s2[i]
            ws = W.w1[i] + W.w2[i]
            W.D[i] = 4.0 * W.w1[i] * W.w2[i] / ws
        for a in range(d):
            for b in range(d):
                W.K[a, b] = 2.0 * Q[a, b]
            W.K[a, a] += reg
        for i in range(m):
            for k in range(indptr[i], indptr[i + 1]):
                for j in range(indptr[i], indptr[i + 1]):
                    W.K[indices[k], indices[j]] += W.D[i] * data[k] * data[j]
        if not _chol_factor(W.K, W.Lc, d):
            for a in range(d):
                W.K[a, a] += 1e-10 * (1.0 + qmax)
            if not _chol_factor(W.K, W.Lc, d):
                return 1, np.asarray(z), it
        for phase in range(2):
            if phase == 0:
                for i in range(m):
                    rc1[i] = W.s1[i] * W.y1[i]
                    rc2[i] = W.s2[i] * W.y2[i]
            else:
                ap = _max_step(&W.s1[0], &W.ds1[0], m)
                v = _max_step(&W.s2[0], &W.ds2[0], m)
                if v < ap:
                    ap = v
                ad = _max_step(&W.y1[0], &W.dy1[0], m)
                v = _max_step(&W.y2[0], &W.dy2[0], m)
                if v < ad:
                    ad = v
                mu_aff = 0.0
                for i in range(m):
                    mu_aff += (W.s1[i] + ap * W.ds1[i]) * (W.y1[i] + ad * W.dy1[i])
                    mu_aff += (W.s2[i] + ap * W.ds2[i]) * (W.y2[i] + ad * W.dy2[i])
                mu_aff /= 2.0 * m
                sig = (mu_aff / mu) ** 3 if mu > 0.0 else 0.0
                for i in range(m):
                    rc1[i] = W.s1[i] * W.y1[i] + W.ds1[i] * W.dy1[i] - sig * mu
                    rc2[i] = W.s2[i] * W.y2[i] + W.ds2[i] * W.dy2[i] - sig * mu
            for i in range(m):
                W.a1[i] = (W.y1[i] * rp1[i] - rc1[i]) / W.s1[i]
                W.a2[i] = (W.y2[i] * rp2[i] - rc2[i]) / W.s2[i]
                ws = W.w1[i] + W.w2[i]
                W.e[i] = (W.w1[i] - W.w2[i]) * (rdt[i] - W.a1[i] - W.a2[i]) / ws + W.a1[i] - W.a2[i]
            for j in range(d):
                rhs[j] = -rdz[j]
            for i in range(m):
                for k in range(indptr[i], indptr[i + 1]):
                    rhs[indices[k]] -= data[k] * W.e[i]
            _chol_solve(W.Lc, &rhs[0], d)
            for j in range(d):
                dz[j] = rhs[j]
            for i in range(m):
                acc = 0.0
                for k in range(indptr[i], indptr[i + 1]):
                    acc += data[k] * dz[indices[k]]
                W.Ldz[i] = acc
                ws = W.w1[i] + W.w2[i]
                W.dt[i] = ((W.w1[i] - W.w2[i]) * acc - rdt[i] + W.a1[i] + W.a2[i]) / ws
                W.dy1[i] = W.w1[i] * (acc - W.dt[i]) + W.a1[i]
                W.dy2[i] = W.w2[i] * (-acc - W.dt[i]) + W.a2[i]
                W.ds1[i] = (-rc1[i] - W.s1[i] * W.dy1[i]) / W.y1[i]
                W.ds2[i] = (-rc2[i] - W.s2[i] * W.dy2[i]) / W.y2[i]
        ap = _max_step(&W.s1[0], &W.ds1[0], m)
        v = _max_step(&W.s2[0], &W.ds2[0], m)
        if v < ap:
            ap = v
        ad = _max_step(&W.y1[0], &W.dy1[0], m)
        v = _max_step(&W.y2[0], &W.dy2[0], m)
        if v < ad:
            ad = v
        ap *= 0.99
        ad *= 0.99
        for j in range(d):
            z[j] += ap * dz[j]
            if not fabs(z[j]) < 1e150:
                return 1, np.asarray(z), it
        for i in range(m):
            W.t[i] += ap * W.dt[i]
            W.s1[i] += ap * W.ds1[i]
            W.s2[i] += ap * W.ds2[i]
            W.y1[i] += ad * W.dy1[i]
            W.y2[i] += ad * W.dy2[i]
    return 1, np.asarray(z), max_iter


def gauge_sweep(double[:, ::1] T, long[::1] basis, double[:, ::1] gx, double[:, ::1] dirs,
                double tol, long max_iter):
    """Re-optimise a gauge tableau for every direction in turn.

    Column j < K carries cost -(gx @ u)[j], column K + j the opposite, the
    two budget slacks cost 0.  Returns (least norms, statuses, final bases,
    final basic values); a direction that does not reach optimality is left
    for the caller to redo.
    """
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t n = T.shape[1] - 1
    cdef Py_ssize_t K = gx.shape[0]
    cdef Py_ssize_t nd = dirs.shape[0]
    cdef double[::1] cost = np.zeros(n)
    cdef double[::1] W = np.zeros(nd)
    cdef long[::1] status = np.zeros(nd, dtype=np.int64)
    cdef long[:, ::1] bases = np.zeros((nd, m), dtype=np.int64)
    cdef double[:, ::1] vals = np.zeros((nd, m))
    cdef Py_ssize_t s, i, j
    cdef double coef, acc, cb
    for s in range(nd):
        for j in range(K):
            coef = gx[j, 0] * dirs[s, 0] + gx[j, 1] * dirs[s, 1]
            cost[j] = -coef
            cost[K + j] = coef
        for j in range(n):
            T[m, j] = cost[j]
        T[m, n] = 0.0
        for i in range(m):
            cb = cost[basis[i]]
            if cb != 0.0:
                for j in range(n + 1):
                    T[m, j] -= cb * T[i, j]
        st, piv = simplex_pivot_loop(T, basis, <int>n, tol, max_iter, 0)
        status[s] = st
        acc = 0.0
        for i in range(m):
            acc += cost[basis[i]] * T[i, n]
            bases[s, i] = basis[i]
            vals[s, i] = T[i, n]
        W[s] = -acc
    return np.asarray(W), np.asarray(status), np.asarray(bases), np.asarray(vals)
