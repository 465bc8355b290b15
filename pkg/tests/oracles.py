"""Independent brute-force checks shared by the module and acceptance tests."""

import numpy as np
from scipy.spatial import cKDTree

from c2plus.cz import SHARP_ONLY


def points_in_box(tree, E, center, half):
    """Indices of E in the half-open box [center - half, center + half)."""
    cand = np.asarray(tree.query_ball_point(center, half * (1 + 1e-12), p=np.inf), dtype=np.int64)
    if cand.size == 0:
        return cand
    P = E[cand]
    inside = np.all((P >= center - half) & (P < center + half), axis=1)
    return np.sort(cand[inside])


def ok_brute(tree, E, diam, cfg, center, side):
    if side > cfg.cutoff:
        return False
    pts = points_in_box(tree, E, center, 2.5 * side)
    return pts.size <= 1 or bool(diam[pts].min() >= cfg.A1 * side)


def cz_violations(state):
    """Count violations of the structural rules of the decomposition.

    Every square must pass the test, every square below the cutoff scale
    must have a failing parent, and every x_Q# must keep its distance to E.
    """
    cz, cfg = state.cz, state.config
    E = state.points
    tree = cKDTree(E)
    diam = state.palps.diameter
    bad_ok = bad_parent = 0
    for s in range(len(cz)):
        side, c = cz.side[s], cz.center[s]
        if not ok_brute(tree, E, diam, cfg, c, side):
            bad_ok += 1
        if side < cfg.cutoff:
            P = cz.dyadic(s).parent()
            if ok_brute(tree, E, diam, cfg, P.center, P.side):
                bad_parent += 1
    d, _ = tree.query(cz.x_sharp)
    bad_xs = int(np.sum(d < cfg.c0 * cz.side))
    return bad_ok, bad_parent, bad_xs


def containing_counts(state, X):
    """How many squares of the decomposition contain each row of X (undilated)."""
    cz = state.cz
    ptr, ids = cz.lambda_ids_many(X)
    counts = np.zeros(len(X), dtype=np.int64)
    tiles = np.array(cz.last_implicit, dtype=float).reshape(-1, 2)
    side_c = 2.0 ** cz.kc
    for q in range(len(X)):
        for s in ids[ptr[q]:ptr[q + 1]]:
            if s >= 0:
                lo = np.array([cz.I[s], cz.J[s]], dtype=float) * cz.side[s]
                hi = lo + cz.side[s]
            else:
                lo = tiles[-s - 1] * side_c
                hi = lo + side_c
            counts[q] += bool(np.all(X[q] >= lo) and np.all(X[q] < hi))
    return counts


def neighbour_ratio(state):
    """Largest sidelength ratio over squares whose (1+2c_G)-dilations meet."""
    cz, cfg = state.cz, state.config
    lam = 1.0 + 2.0 * cfg.c_G
    levels = {int(k): np.flatnonzero(cz.K == k) for k in np.unique(cz.K)}
    trees = {k: cKDTree(cz.center[ids]) for k, ids in levels.items()}
    worst = 1.0
    for k, ids in levels.items():
        for k2, ids2 in levels.items():
            if k2 >= k:
                continue
            r = 0.5 * lam * (2.0 ** k + 2.0 ** k2)
            hits = trees[k2].query_ball_point(cz.center[ids], r * (1 - 1e-12), p=np.inf)
            if any(len(h) for h in hits):
                worst = max(worst, 2.0 ** (k - k2))
    return worst


def sharp_slab_ratio(state):
    """Largest |(y - Rep).u_Q| / |y - Rep| * A1 over y in E cap 5Q, Q sharp."""
    cz, cfg = state.cz, state.config
    E = state.points
    tree = cKDTree(E)
    worst = 0.0
    for s in np.flatnonzero(cz.cls >= SHARP_ONLY):
        if not cz.rep_in5[s]:
            continue
        pts = points_in_box(tree, E, cz.center[s], 2.5 * cz.side[s])
        if pts.size < 2:
            continue
        d = E[pts] - E[cz.rep[s]]
        nd = np.hypot(d[:, 0], d[:, 1])
        keep = nd > 0
        worst = max(worst, float(np.max(np.abs(d[keep] @ cz.u_q[s]) / nd[keep])) * cfg.A1)
    return worst


def whole_set_gauge(x, S, dirs):
    from c2plus.sigma import SigmaLP
    return SigmaLP(x, S).gauges(dirs)
