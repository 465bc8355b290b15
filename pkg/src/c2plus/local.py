"""Per-square extensions.

Every square Q with data near it carries a transition jet T_Q, an affine
polynomial at the point x_Q# that is far from E.  T_Q is zero when the data
near Q is compatible with a function vanishing to second order at x_Q#;
otherwise it is read off the best field on the data near Rep(Q).

When the data meets the dilated square it lies close to a curve that is a
graph over the u_Q-perpendicular axis.  The local extension is

    E_Q = T_Q + (1 - psi) * g(t1(y)),

where t1 is the abscissa along u_Q-perp, g is a one-dimensional extension of
f - T_Q sampled at the abscissas of the data, and psi is a bump equal to 1
near x_Q#.  The straightening map (t1, t2) -> (t1, t2 - phi(t1)) flattens the
data onto the axis; the vertical extension is constant in the second
straightened coordinate, so composing it with that map leaves g(t1(y)).  The
map itself is still available through :func:`straighten`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cz import SHARPSHARP, SHARP_ONLY, CZDecomposition
from .jets import Jet1, Jet2, jarr_compose1d, jarr_mul, singleton_extension_jet
from .one_dim import LinearOperator, NonnegOperator, SortedSamples, depth_set_1d
from .small_trace import SmallTraceInstance, assemble_quad_l1, m0_minimize, m1_minimize

TQ0, TQ1 = "TQ0", "TQ1"


@dataclass(frozen=True)
class TransitionJet:
    jet: Jet1
    rule: str

    @property
    def is_zero(self) -> bool:
        return self.rule == TQ0


@dataclass(frozen=True)
class Straightening:
    """Straightening of one square evaluated at a point x.

    ``phi`` holds (phi, phi', phi'') at ``t_x``.  ``forward`` stacks the
    two-jets at x of both components of the flattening map, ``inverse`` the
    two-jets of both components of its inverse at the image of x.
    """

    t_x: float
    abscissas: np.ndarray
    heights: np.ndarray
    phi: np.ndarray
    forward: np.ndarray
    inverse: np.ndarray
    image: np.ndarray


def _require_sharp(cz: CZDecomposition, s: int, sharpsharp: bool = False) -> None:
    need = SHARPSHARP if sharpsharp else SHARP_ONLY
    if s < 0 or cz.cls[s] < need:
        kind = "meet E in its dilation" if sharpsharp else "have data within 5Q"
        raise ValueError(f"square {s} does not {kind}")


def ssq_data(cz: CZDecomposition, s: int) -> np.ndarray:
    """Sorted indices of the data points of the set S#(Q)."""
    _require_sharp(cz, s)
    rep = int(cz.rep[s])
    return np.unique(np.append(cz.palps.depth_set(rep), rep))


def ssq(cz: CZDecomposition, s: int) -> tuple[np.ndarray, np.ndarray]:
    """Points of S#(Q) and their data indices; x_Q# comes last with index -1."""
    idx = ssq_data(cz, s)
    pts = np.vstack([cz.index.points[idx], cz.x_sharp[s]])
    return pts, np.append(idx, -1)


# ------------------------------------------------------------- transition jets


class TransitionCache:
    """Memo of minimisations shared by the squares of one (f, M) evaluation."""

    def __init__(self):
        self.m1: dict[int, Jet1] = {}
        self.tq: dict[int, TransitionJet] = {}


def m1_jet(palps, i: int, f: np.ndarray, tol: float, memo: dict | None = None) -> Jet1:
    """Jet at point i of the best field on its depth set (memoised in ``memo``).

    The trace-norm pilot field and the transition jets both call this, so a
    shared memo lets one reuse the other's work without changing any bits.
    """
    if memo is not None and i in memo:
        return memo[i]
    idx = np.unique(np.append(palps.depth_set(i), i))
    field = m1_minimize(palps.points[idx], f[idx], tol=tol, polish=False).minimizer
    P1 = field.jet_at(palps.points[i])
    if memo is not None:
        memo[i] = P1
    return P1


def _m0_small(pts, vals, pin, bound, tol) -> bool:
    """Whether the pinned problem has minimum at most ``bound``.

    The constant part of the objective is a lower bound and the objective at
    zero free gradients an upper bound; the minimisation only runs when the
    bound falls between them.
    """
    inst = SmallTraceInstance(pts, vals, pin)
    problem, _ = assemble_quad_l1(inst)
    lower = problem.offset
    if lower > bound:
        return False
    upper = lower + float(np.abs(problem.c).sum())
    if upper <= bound:
        return True
    return m0_minimize(pts, vals, pin, tol=tol).value <= bound


def transition_jet(cz: CZDecomposition, s: int, f, M: float,
                   cache: TransitionCache | None = None) -> TransitionJet:
    _require_sharp(cz, s)
    if cache is not None and s in cache.tq:
        return cache.tq[s]
    cfg = cz.config
    f = np.asarray(f, dtype=float)
    idx = ssq_data(cz, s)
    pts = cz.index.points[idx]
    vals = f[idx]
    xs = cz.x_sharp[s]
    base = (float(xs[0]), float(xs[1]))
    if _m0_small(pts, vals, xs, cfg.C_T * M, cfg.qp_tol):
        out = TransitionJet(Jet1.zero(base), TQ0)
    else:
        P1 = m1_jet(cz.palps, int(cz.rep[s]), f, cfg.qp_tol, None if cache is None else cache.m1)
        out = TransitionJet(singleton_extension_jet(P1, base).truncate(), TQ1)
    if cache is not None:
        cache.tq[s] = out
    return out


def affine_arr(T: Jet1, X: np.ndarray) -> np.ndarray:
    """Stacked two-jets of the affine polynomial T at the rows of X."""
    X = np.asarray(X, dtype=float).reshape(-1, 2)
    out = np.zeros((len(X), 6))
    out[:, 0] = T.value + (X[:, 0] - T.base[0]) * T.grad[0] + (X[:, 1] - T.base[1]) * T.grad[1]
    out[:, 1] = T.grad[0]
    out[:, 2] = T.grad[1]
    return out


# --------------------------------------------------------------- straightening


def _check_inside(cz: CZDecomposition, s: int, X: np.ndarray) -> None:
    half = 0.5 * (1.0 + cz.config.c_G) * cz.side[s]
    off = np.abs(X - cz.center[s]).max(axis=1)
    if np.any(off > half * (1.0 + 1e-12)):
        raise ValueError(f"query point outside the dilated square {s}")


def straighten(cz: CZDecomposition, s: int, x) -> Straightening:
    _require_sharp(cz, s, sharpsharp=True)
    x = np.asarray(x, dtype=float).reshape(2)
    _check_inside(cz, s, x[None, :])
    rep = cz.index.points[cz.rep[s]]
    u, w = cz.u_q[s], cz.u_q_perp[s]
    idx, ts = cz.sorted_projections(s)
    heights = (cz.index.points[idx] - rep) @ u
    t_x = float((x - rep) @ w)
    t2 = float((x - rep) @ u)
    phi = LinearOperator(SortedSamples(ts, heights)).jets([t_x])[0]
    p0, p1, p2 = phi
    fwd = np.zeros((2, 6))
    fwd[0, 0], fwd[0, 1:3] = t_x, w
    fwd[1, 0] = t2 - p0
    fwd[1, 1:3] = u - p1 * w
    fwd[1, 3:6] = -p2 * np.array([w[0] * w[0], w[0] * w[1], w[1] * w[1]])
    # inverse: y = rep + s1 * w + (s2 + phi(s1)) * u, at (s1, s2) = image of x
    image = np.array([t_x, t2 - p0])
    inv = np.zeros((2, 6))
    for i in (0, 1):
        inv[i, 0] = x[i]
        inv[i, 1] = w[i] + p1 * u[i]
        inv[i, 2] = u[i]
        inv[i, 3] = p2 * u[i]
    return Straightening(t_x, ts, heights, phi, fwd, inv, image)


# ------------------------------------------------------------------ the bump


def _radial_profile(r: np.ndarray, a: float, b: float):
    """1 on [0, a], 0 on [b, inf), C^2 quintic in between; returns h, h', h''."""
    s = np.clip((r - a) / (b - a), 0.0, 1.0)
    h = 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
    d1 = -30.0 * s * s * (1.0 - s) ** 2 / (b - a)
    d2 = -60.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / (b - a) ** 2
    return h, d1, d2


def psi_arr(cz: CZDecomposition, s: int, X: np.ndarray) -> np.ndarray:
    """Stacked two-jets of the bump around x_Q# at the rows of X."""
    X = np.asarray(X, dtype=float).reshape(-1, 2)
    a = 0.25 * cz.config.c0 * cz.side[s]
    b = 2.0 * a
    d = X - cz.x_sharp[s]
    r = np.hypot(d[:, 0], d[:, 1])
    out = np.zeros((len(X), 6))
    out[r <= a, 0] = 1.0
    ring = np.flatnonzero((r > a) & (r < b))
    if ring.size:
        h, h1, h2 = _radial_profile(r[ring], a, b)
        e = d[ring] / r[ring, None]
        t = h1 / r[ring]
        out[ring, 0] = h
        out[ring, 1:3] = h1[:, None] * e
        out[ring, 3] = h2 * e[:, 0] ** 2 + t * (1.0 - e[:, 0] ** 2)
        out[ring, 4] = (h2 - t) * e[:, 0] * e[:, 1]
        out[ring, 5] = h2 * e[:, 1] ** 2 + t * (1.0 - e[:, 1] ** 2)
    return out


def psi_jet(cz: CZDecomposition, s: int, x) -> Jet2:
    x = np.asarray(x, dtype=float).reshape(2)
    return Jet2.from_array((float(x[0]), float(x[1])), psi_arr(cz, s, x)[0])


# ------------------------------------------------------------ local extension


class LocalExtension:
    """The extension E_Q for one square and fixed (f, M), evaluated in batches."""

    def __init__(self, cz: CZDecomposition, s: int, f, M: float,
                 cache: TransitionCache | None = None):
        _require_sharp(cz, s, sharpsharp=True)
        self.cz, self.s = cz, s
        f = np.asarray(f, dtype=float)
        self.T = transition_jet(cz, s, f, M, cache)
        idx, ts = cz.sorted_projections(s)
        samples = f[idx]
        if not self.T.is_zero:
            samples = samples - affine_arr(self.T.jet, cz.index.points[idx])[:, 0]
            self.op = LinearOperator(SortedSamples(ts, samples))
        else:
            self.op = NonnegOperator(SortedSamples(ts, samples), tol=cz.config.lp_tol)
        self.idx = idx
        self.ts = ts

    def abscissas(self, X: np.ndarray) -> np.ndarray:
        cz, s = self.cz, self.s
        return (X - cz.index.points[cz.rep[s]]) @ cz.u_q_perp[s]

    def jets(self, X: np.ndarray) -> np.ndarray:
        cz, s = self.cz, self.s
        X = np.asarray(X, dtype=float).reshape(-1, 2)
        _check_inside(cz, s, X)
        t = self.abscissas(X)
        g = self.op.jets(t)
        inner = np.zeros((len(X), 6))
        inner[:, 0] = t
        inner[:, 1:3] = cz.u_q_perp[s]
        vertical = jarr_compose1d(g, inner)
        cut = psi_arr(cz, s, X)
        cut[:, 0] = 1.0 - cut[:, 0]
        cut[:, 1:] = -cut[:, 1:]
        return affine_arr(self.T.jet, X) + jarr_mul(cut, vertical)

    def depth(self, x) -> np.ndarray:
        """Data indices the jet at x reads."""
        t = float(self.abscissas(np.asarray(x, dtype=float).reshape(1, 2))[0])
        near = self.idx[depth_set_1d(self.ts, t)]
        return np.union1d(near, ssq_data(self.cz, self.s))


def local_jet(cz: CZDecomposition, s: int, x, f, M: float,
              cache: TransitionCache | None = None) -> Jet2:
    x = np.asarray(x, dtype=float).reshape(2)
    arr = LocalExtension(cz, s, f, M, cache).jets(x[None, :])[0]
    return Jet2.from_array((float(x[0]), float(x[1])), arr)


def local_depth_set(cz: CZDecomposition, s: int, x) -> np.ndarray:
    _require_sharp(cz, s, sharpsharp=True)
    idx, ts = cz.sorted_projections(s)
    rep = cz.index.points[cz.rep[s]]
    t = float((np.asarray(x, dtype=float) - rep) @ cz.u_q_perp[s])
    return np.union1d(idx[depth_set_1d(ts, t)], ssq_data(cz, s))
