"""Bounded-depth extension operators on the line.

Given sorted abscissas t_0 < ... < t_{N-1} and samples v, both operators
glue together extensions built on the sliding windows {t_w, t_w+1, t_w+2}.
On [t_k, t_k+1] the weight moves from window k-1 to window k along a C^2
quintic ramp with flat ends, so at most two windows are active anywhere and
the jet at t only reads the samples listed by :func:`depth_set_1d`.

* :class:`NonnegOperator` builds each window from the minimiser of the
  discrete norm (sum of absolute differences plus |P'|^2/P), lifted to the
  nonnegative quadratics P + K (s - t_i)^2.
* :class:`LinearOperator` builds each window from the least-squares Whitney
  field of the window, which depends linearly on the samples and reproduces
  affine data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jets import Jet1D
from .qp import QuadL1Problem, solve_quad_l1

# Fraction of each gap kept flat at both ends of a ramp.
PLATEAU = 0.25


@dataclass(frozen=True)
class SortedSamples:
    t: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float).reshape(-1)
        v = np.asarray(self.v, dtype=float).reshape(-1)
        if t.shape != v.shape:
            raise ValueError("abscissas and samples differ in length")
        if t.size == 0:
            raise ValueError("at least one sample is required")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise ValueError("samples must be finite")
        if np.any(np.diff(t) <= 0):
            raise ValueError("abscissas must be strictly increasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "v", v)

    def __len__(self) -> int:
        return self.t.size


def ramp(u):
    """Quintic smoothstep with flat ends: 0 on u <= PLATEAU, 1 on u >= 1 - PLATEAU.

    Returns (value, first derivative, second derivative) in u.
    """
    u = np.asarray(u, dtype=float)
    width = 1.0 - 2.0 * PLATEAU
    s = np.clip((u - PLATEAU) / width, 0.0, 1.0)
    val = s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
    d1 = 30.0 * s * s * (1.0 - s) ** 2 / width
    d2 = 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / (width * width)
    return val, d1, d2


def depth_set_1d(samples: SortedSamples | np.ndarray, t: float) -> np.ndarray:
    """Indices of the samples that the jet at ``t`` may depend on."""
    ts = samples.t if isinstance(samples, SortedSamples) else np.asarray(samples, dtype=float)
    n = ts.size
    if n <= 3:
        return np.arange(n)
    if t <= ts[1]:
        return np.arange(3)
    if t >= ts[n - 2]:
        return np.arange(n - 3, n)
    k = int(np.searchsorted(ts, t, side="right")) - 1
    return np.arange(k - 1, k + 3)


def _blend(nodes: np.ndarray, piece, s: np.ndarray) -> np.ndarray:
    """Glue the functions ``piece(i, s)`` attached to ``nodes`` with ramps.

    ``piece(i, s)`` returns an (len(s), 3) array of (value, d1, d2).  Left of
    the first node only piece 0 is used, right of the last only the final
    piece; pieces with zero weight are never evaluated.
    """
    s = np.asarray(s, dtype=float)
    out = np.zeros((s.size, 3))
    n = nodes.size
    if n == 1:
        return piece(0, s)
    k = np.clip(np.searchsorted(nodes, s, side="right") - 1, 0, n - 2)
    h = nodes[k + 1] - nodes[k]
    rho, r1, r2 = ramp((s - nodes[k]) / h)
    r1 = r1 / h
    r2 = r2 / (h * h)
    for j in range(n - 1):
        sel = np.flatnonzero(k == j)
        if sel.size == 0:
            continue
        rj, dj, ddj = rho[sel], r1[sel], r2[sel]
        left = rj < 1.0
        right = rj > 0.0
        a = np.zeros((sel.size, 3))
        b = np.zeros((sel.size, 3))
        if left.any():
            a[left] = piece(j, s[sel[left]])
        if right.any():
            b[right] = piece(j + 1, s[sel[right]])
        diff = b - a
        blk = (1.0 - rj)[:, None] * a + rj[:, None] * b
        blk[:, 1] += dj * diff[:, 0]
        blk[:, 2] += ddj * diff[:, 0] + 2.0 * dj * diff[:, 1]
        out[sel] = blk
    return out


# ---------------------------------------------------------------------------
# base fields on at most three nodes


def nonneg_window_field(t: np.ndarray, v: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Derivatives minimising the discrete C^2_+ functional on one window.

    Derivatives at zero samples are pinned to zero.
    """
    n = t.size
    free = np.flatnonzero(v > 0)
    d = free.size
    deriv = np.zeros(n)
    if d == 0:
        return deriv
    col = -np.ones(n, dtype=np.int64)
    col[free] = np.arange(d)
    rows, rhs = [], []
    for i in free:
        r = np.zeros(d)
        r[col[i]] = 1.0
        rows.append(r)
        rhs.append(0.0)
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            h = t[a] - t[b]
            if col[b] >= 0:
                r = np.zeros(d)
                r[col[b]] = h / (h * h)
                rows.append(r)
                rhs.append((v[a] - v[b]) / (h * h))
            if col[a] >= 0 or col[b] >= 0:
                r = np.zeros(d)
                if col[a] >= 0:
                    r[col[a]] += 1.0 / abs(h)
                if col[b] >= 0:
                    r[col[b]] -= 1.0 / abs(h)
                rows.append(r)
                rhs.append(0.0)
    Q = np.diag(1.0 / v[free])
    prob = QuadL1Problem(Q=Q, q=np.zeros(d), L=np.array(rows), c=np.array(rhs))
    sol = solve_quad_l1(prob, tol=tol)
    deriv[free] = sol.beta
    return deriv


def linear_window_field(t: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Least-squares derivatives for the cross terms of the window.

    The map v -> derivatives is linear and exact on affine data.
    """
    n = t.size
    if n == 1:
        return np.zeros(1)
    rows, rhs = [], []
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            h = t[a] - t[b]
            r = np.zeros(n)
            r[b] = 1.0 / h
            rows.append(r)
            rhs.append((v[a] - v[b]) / (h * h))
            r = np.zeros(n)
            r[a] = 1.0 / abs(h)
            r[b] = -1.0 / abs(h)
            rows.append(r)
            rhs.append(0.0)
    A = np.array(rows)
    return np.linalg.lstsq(A, np.array(rhs), rcond=None)[0]


def _quadratic_pieces(t, v, deriv, lifted):
    if lifted:
        with np.errstate(divide="ignore", invalid="ignore"):
            K = np.where(v > 0, deriv * deriv / (4.0 * np.where(v > 0, v, 1.0)), 0.0)
    else:
        K = np.zeros_like(v)

    def piece(i, s):
        ds = s - t[i]
        out = np.empty((s.size, 3))
        out[:, 0] = v[i] + deriv[i] * ds + K[i] * ds * ds
        out[:, 1] = deriv[i] + 2.0 * K[i] * ds
        out[:, 2] = 2.0 * K[i]
        return out

    return piece


class _WindowedOperator:
    lifted = False

    def __init__(self, samples: SortedSamples):
        self.samples = samples
        self._fields: dict[int, np.ndarray] = {}

    @property
    def n_windows(self) -> int:
        return max(len(self.samples) - 2, 1)

    def window_nodes(self, w: int) -> slice:
        return slice(w, min(w + 3, len(self.samples)))

    def _field(self, w: int) -> np.ndarray:
        deriv = self._fields.get(w)
        if deriv is None:
            sl = self.window_nodes(w)
            deriv = self._solve(self.samples.t[sl], self.samples.v[sl])
            self._fields[w] = deriv
        return deriv

    def _solve(self, t, v):
        raise NotImplementedError

    def window_eval(self, w: int, s) -> np.ndarray:
        sl = self.window_nodes(w)
        t, v = self.samples.t[sl], self.samples.v[sl]
        piece = _quadratic_pieces(t, v, self._field(w), self.lifted)
        return _blend(t, piece, np.atleast_1d(np.asarray(s, dtype=float)))

    def jets(self, s) -> np.ndarray:
        """Stack of (value, d1, d2) at every abscissa in ``s``."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        n = len(self.samples)
        if n <= 3:
            return self.window_eval(0, s)
        # window starting at index w is centred on node w+1
        centres = self.samples.t[1:n - 1]
        return _blend(centres, lambda w, x: self.window_eval(int(w), x), s)

    def jet(self, s: float) -> Jet1D:
        val, d1, d2 = self.jets([s])[0]
        return Jet1D(float(s), float(val), float(d1), float(d2))

    def values(self, s) -> np.ndarray:
        return self.jets(s)[:, 0]


class NonnegOperator(_WindowedOperator):
    lifted = True

    def __init__(self, samples: SortedSamples, tol: float = 1e-9):
        if np.any(samples.v < 0):
            raise ValueError("nonnegative operator needs nonnegative samples")
        super().__init__(samples)
        self.tol = tol

    def _solve(self, t, v):
        return nonneg_window_field(t, v, self.tol)


class LinearOperator(_WindowedOperator):
    lifted = False

    def _solve(self, t, v):
        return linear_window_field(t, v)


def _as_samples(samples) -> SortedSamples:
    if isinstance(samples, SortedSamples):
        return samples
    t, v = samples
    return SortedSamples(t, v)


def oned_base_nonneg(samples, t: float) -> Jet1D:
    s = _as_samples(samples)
    if len(s) > 3:
        raise ValueError("base case takes at most three samples")
    return NonnegOperator(s).jet(t)


def oned_nonneg_jet(samples, t: float) -> Jet1D:
    return NonnegOperator(_as_samples(samples)).jet(t)


def oned_linear_jet(samples, t: float) -> Jet1D:
    return LinearOperator(_as_samples(samples)).jet(t)
