"""Jets, Whitney fields and the norms built from them.

Two representations live side by side.  The frozen dataclasses `Jet1`,
`Jet2` and `WhitneyField` form the public value types.  Internally the
query pipeline works on stacked arrays of two-jets with trailing axis

    [value, d/dx, d/dy, d2/dx2, d2/dxdy, d2/dy2]

so that whole batches of query points can be combined at once.  The Hessian
entry (i, j) always stores the plain partial derivative d_i d_j, and the
Taylor polynomial carries the usual factor 1/2 on the quadratic part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

INF = math.inf


def _pt(p) -> tuple[float, float]:
    x, y = p
    x, y = float(x), float(y)
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"point coordinates must be finite, got {p!r}")
    return (x, y)


@dataclass(frozen=True)
class Jet1:
    """Affine polynomial ``value + grad . (y - base)``."""

    base: tuple[float, float]
    value: float
    grad: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "base", _pt(self.base))
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "grad", (float(self.grad[0]), float(self.grad[1])))

    @classmethod
    def zero(cls, base) -> "Jet1":
        return cls(base, 0.0, (0.0, 0.0))

    def as_jet2(self) -> "Jet2":
        return Jet2(self.base, self.value, self.grad, ((0.0, 0.0), (0.0, 0.0)))


@dataclass(frozen=True)
class Jet2:
    """Quadratic Taylor polynomial anchored at ``base``."""

    base: tuple[float, float]
    value: float
    grad: tuple[float, float]
    hess: tuple[tuple[float, float], tuple[float, float]]

    def __post_init__(self):
        object.__setattr__(self, "base", _pt(self.base))
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "grad", (float(self.grad[0]), float(self.grad[1])))
        h = self.hess
        h01 = float(h[0][1])
        if float(h[1][0]) != h01:
            # Store an exactly symmetric matrix.
            h01 = 0.5 * (h01 + float(h[1][0]))
        object.__setattr__(self, "hess", ((float(h[0][0]), h01), (h01, float(h[1][1]))))

    @classmethod
    def zero(cls, base) -> "Jet2":
        return cls(base, 0.0, (0.0, 0.0), ((0.0, 0.0), (0.0, 0.0)))

    @classmethod
    def constant(cls, base, c: float) -> "Jet2":
        return cls(base, c, (0.0, 0.0), ((0.0, 0.0), (0.0, 0.0)))

    @classmethod
    def from_array(cls, base, arr) -> "Jet2":
        a = [float(v) for v in arr]
        return cls(base, a[0], (a[1], a[2]), ((a[3], a[4]), (a[4], a[5])))

    def to_array(self) -> np.ndarray:
        h = self.hess
        return np.array([self.value, self.grad[0], self.grad[1], h[0][0], h[0][1], h[1][1]])

    def truncate(self) -> Jet1:
        return Jet1(self.base, self.value, self.grad)


# ---------------------------------------------------------------------------
# scalar operations


def jet1_eval(P: Jet1, y) -> float:
    dx = float(y[0]) - P.base[0]
    dy = float(y[1]) - P.base[1]
    return P.value + P.grad[0] * dx + P.grad[1] * dy


def jet2_eval(P: Jet2, y) -> float:
    dx = float(y[0]) - P.base[0]
    dy = float(y[1]) - P.base[1]
    (hxx, hxy), (_, hyy) = P.hess
    quad = 0.5 * (hxx * dx * dx + 2.0 * hxy * dx * dy + hyy * dy * dy)
    return P.value + P.grad[0] * dx + P.grad[1] * dy + quad


def jet1_rebase(P: Jet1, b) -> Jet1:
    b = _pt(b)
    if b == P.base:
        return P
    return Jet1(b, jet1_eval(P, b), P.grad)


def jet2_multiply(P: Jet2, R: Jet2) -> Jet2:
    if P.base != R.base:
        raise ValueError(f"jets anchored at different points: {P.base} vs {R.base}")
    out = jarr_mul(P.to_array(), R.to_array())
    return Jet2.from_array(P.base, out)


def jet2_add(P: Jet2, R: Jet2) -> Jet2:
    if P.base != R.base:
        raise ValueError(f"jets anchored at different points: {P.base} vs {R.base}")
    return Jet2.from_array(P.base, P.to_array() + R.to_array())


@dataclass(frozen=True)
class Jet1D:
    """Two-jet of a function of one variable at ``base``."""

    base: float
    value: float
    d1: float
    d2: float

    def eval(self, s: float) -> float:
        h = s - self.base
        return self.value + self.d1 * h + 0.5 * self.d2 * h * h


def jet2_compose_1d(g: Jet1D, H: Sequence[Jet2]) -> Jet2:
    """Two-jet of ``y -> g(H_1(y))`` by the chain rule."""
    H1 = H[0]
    if H1.value != g.base:
        raise ValueError(f"1-D jet anchored at {g.base}, inner map takes value {H1.value}")
    out = jarr_compose1d(np.array([g.value, g.d1, g.d2]), H1.to_array())
    return Jet2.from_array(H1.base, out)


# ---------------------------------------------------------------------------
# array kernels on stacked jets (trailing axis of length 6)


def jarr_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Truncated product of stacked two-jets (Leibniz rule)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    av, ax, ay, axx, axy, ayy = (a[..., i] for i in range(6))
    bv, bx, by, bxx, bxy, byy = (b[..., i] for i in range(6))
    out[..., 0] = av * bv
    out[..., 1] = ax * bv + av * bx
    out[..., 2] = ay * bv + av * by
    # grouped so that swapping a and b gives bit-identical results
    out[..., 3] = (axx * bv + av * bxx) + 2.0 * (ax * bx)
    out[..., 4] = (axy * bv + av * bxy) + (ax * by + ay * bx)
    out[..., 5] = (ayy * bv + av * byy) + 2.0 * (ay * by)
    return out


def jarr_recip(a: np.ndarray) -> np.ndarray:
    """Two-jet of ``1/F`` given the two-jet of ``F`` (value must be nonzero)."""
    a = np.asarray(a, dtype=float)
    v = a[..., 0]
    inv = 1.0 / v
    inv2 = inv * inv
    inv3 = inv2 * inv
    out = np.empty_like(a)
    out[..., 0] = inv
    out[..., 1] = -a[..., 1] * inv2
    out[..., 2] = -a[..., 2] * inv2
    out[..., 3] = 2.0 * a[..., 1] * a[..., 1] * inv3 - a[..., 3] * inv2
    out[..., 4] = 2.0 * a[..., 1] * a[..., 2] * inv3 - a[..., 4] * inv2
    out[..., 5] = 2.0 * a[..., 2] * a[..., 2] * inv3 - a[..., 5] * inv2
    return out


def jarr_compose1d(g: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Chain rule for ``g(h(y))``; ``g`` stacks (value, g', g'') at h(y)."""
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    g0, g1, g2 = g[..., 0], g[..., 1], g[..., 2]
    hx, hy = h[..., 1], h[..., 2]
    out = np.empty(np.broadcast_shapes(g.shape[:-1] + (6,), h.shape))
    out[..., 0] = g0
    out[..., 1] = g1 * hx
    out[..., 2] = g1 * hy
    out[..., 3] = g2 * hx * hx + g1 * h[..., 3]
    out[..., 4] = g2 * hx * hy + g1 * h[..., 4]
    out[..., 5] = g2 * hy * hy + g1 * h[..., 5]
    return out


def jarr_eval(a: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Evaluate stacked jets at displacement ``d`` from their bases."""
    dx, dy = d[..., 0], d[..., 1]
    return (a[..., 0] + a[..., 1] * dx + a[..., 2] * dy
            + 0.5 * (a[..., 3] * dx * dx + 2.0 * a[..., 4] * dx * dy + a[..., 5] * dy * dy))


# ---------------------------------------------------------------------------
# Whitney fields


@dataclass(frozen=True)
class WhitneyField:
    """A one-jet attached to each point of a finite set."""

    entries: tuple[Jet1, ...]
    _points: np.ndarray = field(init=False, repr=False, compare=False)
    _values: np.ndarray = field(init=False, repr=False, compare=False)
    _grads: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        pts = np.array([e.base for e in entries], dtype=float).reshape(-1, 2)
        if len({e.base for e in entries}) != len(entries):
            raise ValueError("Whitney field has duplicate anchor points")
        object.__setattr__(self, "_points", pts)
        object.__setattr__(self, "_values", np.array([e.value for e in entries], dtype=float))
        object.__setattr__(self, "_grads", np.array([e.grad for e in entries], dtype=float).reshape(-1, 2))

    @classmethod
    def from_arrays(cls, points, values, grads) -> "WhitneyField":
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        values = np.asarray(values, dtype=float).reshape(-1)
        grads = np.asarray(grads, dtype=float).reshape(-1, 2)
        return cls(tuple(Jet1(p, v, g) for p, v, g in zip(points, values, grads)))

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def grads(self) -> np.ndarray:
        return self._grads

    def __len__(self) -> int:
        return len(self.entries)

    def jet_at(self, point) -> Jet1:
        key = _pt(point)
        for e in self.entries:
            if e.base == key:
                return e
        raise KeyError(point)


def _cross_terms(pts: np.ndarray, vals: np.ndarray, grads: np.ndarray):
    """Ordered-pair difference terms; returns (value_terms, grad_terms) arrays."""
    n = len(pts)
    if n < 2:
        return np.zeros(0), np.zeros((0, 2))
    ii, jj = np.nonzero(~np.eye(n, dtype=bool))
    diff = pts[ii] - pts[jj]
    r2 = np.einsum("ij,ij->i", diff, diff)
    r = np.sqrt(r2)
    # (P^x - P^y)(x) with x = pts[ii], y = pts[jj]
    num = vals[ii] - vals[jj] - np.einsum("ij,ij->i", grads[jj], diff)
    vterm = np.abs(num) / r2
    gterm = np.abs(grads[ii] - grads[jj]) / r[:, None]
    return vterm, gterm


def whitney_norm(F: WhitneyField) -> float:
    if len(F) == 0:
        raise ValueError("empty Whitney field")
    single = max(float(np.max(np.abs(F.values))), float(np.max(np.abs(F.grads))))
    vterm, gterm = _cross_terms(F.points, F.values, F.grads)
    cross = 0.0
    if len(vterm):
        cross = max(float(vterm.max()), float(gterm.max()))
    return single + cross


def wplus_excess(P: Jet1) -> float:
    """Smallest K >= 0 with P(y) + K|y - base|^2 >= 0 everywhere."""
    g = math.hypot(P.grad[0], P.grad[1])
    if P.value > 0:
        # squared last so tiny gradients do not underflow to zero
        r = g / (2.0 * math.sqrt(P.value))
        return r * r  # inf when the excess overflows
    if P.value == 0 and g == 0:
        return 0.0
    return INF


def wplus_norm(F: WhitneyField) -> float:
    excess = max(wplus_excess(e) for e in F.entries)
    return whitney_norm(F) + excess


def q_functional(F: WhitneyField) -> float:
    single = float(np.abs(F.values).sum() + np.abs(F.grads).sum())
    vterm, gterm = _cross_terms(F.points, F.values, F.grads)
    return single + float(vterm.sum() + gterm.sum())


def m_functional(F: WhitneyField) -> float:
    if np.any(F.values < 0):
        return INF
    total = 0.0
    for v, g in zip(F.values, F.grads):
        if g[0] == 0.0 and g[1] == 0.0:
            continue
        if v == 0.0:
            return INF
        total += (math.hypot(g[0], g[1]) / math.sqrt(v)) ** 2
    return total


def singleton_extension_jet(P: Jet1, query) -> Jet2:
    """Two-jet at ``query`` of ``P(y) + K|y - x0|^2`` with K the excess of P.

    The quadratic is nonnegative on the whole plane.  No cutoff is applied:
    every caller evaluates it within a bounded multiple of the unit scale.
    """
    K = wplus_excess(P)
    if not math.isfinite(K):
        raise ValueError("jet has infinite excess; no nonnegative extension exists")
    q = _pt(query)
    dx = q[0] - P.base[0]
    dy = q[1] - P.base[1]
    value = P.value + P.grad[0] * dx + P.grad[1] * dy + K * (dx * dx + dy * dy)
    grad = (P.grad[0] + 2.0 * K * dx, P.grad[1] + 2.0 * K * dy)
    return Jet2(q, value, grad, ((2.0 * K, 0.0), (0.0, 2.0 * K)))


def singleton_extension_arr(base, value: float, grad, queries: np.ndarray) -> np.ndarray:
    """Vectorised `singleton_extension_jet` returning stacked jets."""
    K = wplus_excess(Jet1(base, value, grad))
    if not math.isfinite(K):
        raise ValueError("jet has infinite excess; no nonnegative extension exists")
    d = np.asarray(queries, dtype=float).reshape(-1, 2) - np.asarray(base, dtype=float)
    out = np.zeros((len(d), 6))
    out[:, 0] = value + grad[0] * d[:, 0] + grad[1] * d[:, 1] + K * (d[:, 0] ** 2 + d[:, 1] ** 2)
    out[:, 1] = grad[0] + 2.0 * K * d[:, 0]
    out[:, 2] = grad[1] + 2.0 * K * d[:, 1]
    out[:, 3] = 2.0 * K
    out[:, 5] = 2.0 * K
    return out


def field_from_jets(jets: Iterable[Jet1]) -> WhitneyField:
    return WhitneyField(tuple(jets))
