"""Global extension, representative sets and the trace-norm estimate.

The global function is a partition of unity over the decomposition,

    F = sum_Q theta_Q * E#_Q,

where E#_Q is the local extension for squares whose dilation meets E, the
quadratic T_Q + K|y - x_Q#|^2 for squares with data only in 5Q, the same
quadratic of the relay square mu(Q) for small empty squares, and zero for
every other square.  ``theta_Q = eta_Q / sum eta`` with eta_Q a tensor
product bump that is 1 on (1 - c_G/2)Q and vanishes outside (1 + c_G/2)Q.

A :class:`PreprocessedState` holds everything that depends on E alone.  An
:class:`Interpolant` binds it to data (f, M) and answers jet queries.
"""

from __future__ import annotations

import hashlib
import io
import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _backend
from .config import Config
from .cz import EMPTY_SMALL, SHARPSHARP, SHARP_ONLY, CZDecomposition, build_cz
from .geometry import WSPD, PointIndex
from .jets import Jet2, jarr_mul, jarr_recip, singleton_extension_arr
from .local import (LocalExtension, TransitionCache, local_depth_set, m1_jet, ssq_data,
                    transition_jet)
from .sigma import PALPTable, build_palp_table
from .small_trace import small_trace_norm

STATE_MAGIC = b"C2PSTATE"
STATE_VERSION = (1, 0, 0)


# ---------------------------------------------------------------- partition


def _bump_1d(u: np.ndarray, plateau: float):
    """Even C^2 bump: 1 on |u| <= plateau, 0 on |u| >= 1, quintic between."""
    a = np.abs(u)
    s = np.clip((a - plateau) / (1.0 - plateau), 0.0, 1.0)
    w = 1.0 - plateau
    val = 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
    d1 = -30.0 * s * s * (1.0 - s) ** 2 / w * np.sign(u)
    d2 = -60.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / (w * w)
    return val, d1, d2


def eta_arr(X: np.ndarray, centers: np.ndarray, sides: np.ndarray, c_G: float) -> np.ndarray:
    """Unnormalised bump jets of squares (rows of centers/sides) at rows of X."""
    h = 0.5 * (1.0 + 0.5 * c_G) * sides
    plateau = (1.0 - 0.5 * c_G) / (1.0 + 0.5 * c_G)
    u = (X - centers) / h[:, None]
    bx, bx1, bx2 = _bump_1d(u[:, 0], plateau)
    by, by1, by2 = _bump_1d(u[:, 1], plateau)
    out = np.empty((len(X), 6))
    out[:, 0] = bx * by
    out[:, 1] = bx1 * by / h
    out[:, 2] = bx * by1 / h
    out[:, 3] = bx2 * by / h ** 2
    out[:, 4] = bx1 * by1 / h ** 2
    out[:, 5] = bx * by2 / h ** 2
    return out


@dataclass
class _Cover:
    """Query/square incidences with nonzero partition weight."""

    q: np.ndarray
    sid: np.ndarray  # square id, or -1 for an implicit tile
    theta: np.ndarray
    n: int


# -------------------------------------------------------------------- state


class PreprocessedState:
    """Everything derived from the point set alone."""

    def __init__(self, index: PointIndex, palps: PALPTable, config: Config,
                 cz: CZDecomposition | None = None):
        self.index = index
        self.palps = palps
        self.config = config
        self.cz = cz if cz is not None else build_cz(index, palps, config)
        self._wspd: WSPD | None = None
        self._point_sets: tuple[np.ndarray, np.ndarray] | None = None
        self._m1: tuple[bytes, dict] | None = None

    @classmethod
    def build(cls, E, config: Config | None = None) -> "PreprocessedState":
        config = config or Config()
        index = PointIndex(E)
        palps = build_palp_table(index, config.k_depth, config.m_dir)
        return cls(index, palps, config)

    @property
    def points(self) -> np.ndarray:
        return self.index.points

    @property
    def n(self) -> int:
        return self.index.n

    # -- the cover ---------------------------------------------------------

    def cover(self, X: np.ndarray) -> _Cover:
        cz = self.cz
        X = np.asarray(X, dtype=float).reshape(-1, 2)
        ptr, ids = cz.lambda_ids_many(X)
        q = np.repeat(np.arange(len(X)), np.diff(ptr))
        centers = np.empty((ids.size, 2))
        sides = np.empty(ids.size)
        real = ids >= 0
        centers[real] = cz.center[ids[real]]
        sides[real] = cz.side[ids[real]]
        if (~real).any():
            tiles = np.array(cz.last_implicit, dtype=float)[-ids[~real] - 1]
            side = 2.0 ** cz.kc
            centers[~real] = (tiles + 0.5) * side
            sides[~real] = side
        eta = eta_arr(X[q], centers, sides, self.config.c_G)
        total = np.zeros((len(X), 6))
        np.add.at(total, q, eta)
        if np.any(total[:, 0] <= 0):
            raise RuntimeError("partition of unity vanishes at a query point")
        theta = jarr_mul(eta, jarr_recip(total)[q])
        live = np.any(eta != 0.0, axis=1)
        return _Cover(q[live], np.where(real, ids, -1)[live], theta[live], len(X))

    def pou_jets(self, x) -> list[tuple[int, Jet2]]:
        """(square id, theta jet) for every square with nonzero weight at x."""
        x = np.asarray(x, dtype=float).reshape(2)
        c = self.cover(x[None, :])
        base = (float(x[0]), float(x[1]))
        return [(int(s), Jet2.from_array(base, t)) for s, t in zip(c.sid, c.theta)]

    def m1_memo(self, f: np.ndarray) -> dict:
        """Per-point M1 jets for the data f, kept for the most recent f only."""
        key = hashlib.sha256(np.ascontiguousarray(f, dtype="<f8").tobytes()).digest()
        if self._m1 is None or self._m1[0] != key:
            self._m1 = (key, {})
        return self._m1[1]

    # -- representative sets -----------------------------------------------

    def _case_depth(self, s: int, x: np.ndarray) -> np.ndarray:
        cz = self.cz
        if s < 0:
            return np.zeros(0, dtype=np.int64)
        cls = cz.cls[s]
        if cls == SHARPSHARP:
            return local_depth_set(cz, s, x)
        if cls == SHARP_ONLY:
            return ssq_data(cz, s)
        if cls == EMPTY_SMALL:
            return ssq_data(cz, int(cz.mu[s]))
        return np.zeros(0, dtype=np.int64)

    def representative_sets(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """CSR (ptr, indices) of S(x) for every row of X; each set sorted."""
        X = np.asarray(X, dtype=float).reshape(-1, 2)
        c = self.cover(X)
        parts: list[list[np.ndarray]] = [[] for _ in range(len(X))]
        for q, s in zip(c.q, c.sid):
            parts[q].append(self._case_depth(int(s), X[q]))
        sets = [np.unique(np.concatenate(p)) if p else np.zeros(0, np.int64) for p in parts]
        ptr = np.zeros(len(X) + 1, dtype=np.int64)
        ptr[1:] = np.cumsum([s.size for s in sets])
        idx = np.concatenate(sets) if sets else np.zeros(0, np.int64)
        return ptr, idx.astype(np.int64)

    def representative_set(self, x) -> np.ndarray:
        ptr, idx = self.representative_sets(np.asarray(x, dtype=float).reshape(1, 2))
        return idx[ptr[0]:ptr[1]]

    def point_sets(self) -> tuple[np.ndarray, np.ndarray]:
        """Representative sets at the data points themselves (cached)."""
        if self._point_sets is None:
            self._point_sets = self.representative_sets(self.points)
        return self._point_sets

    # -- finiteness sets ---------------------------------------------------

    def wspd(self) -> WSPD:
        if self._wspd is None:
            self._wspd = self.index.build_wspd(self.config.kappa0)
        return self._wspd

    def sfp_family(self) -> "FinitenessFamily":
        W = self.wspd()
        ptr, idx = self.point_sets()
        return FinitenessFamily(W.rep_left.astype(np.int64), W.rep_right.astype(np.int64), ptr, idx)

    # -- persistence ---------------------------------------------------------

    def to_bytes(self) -> bytes:
        payload = io.BytesIO()
        np.savez(
            payload,
            index=np.frombuffer(self.index.to_bytes(), dtype=np.uint8),
            config=np.frombuffer(json.dumps(self.config.to_lines()).encode(), dtype=np.uint8),
            depth=self.palps.depth, u_max=self.palps.u_max, eps=self.palps.eps,
            diameter=self.palps.diameter)
        return STATE_MAGIC + struct.pack("<3H", *STATE_VERSION) + payload.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "PreprocessedState":
        if data[:8] != STATE_MAGIC:
            raise ValueError("not a preprocessed state file")
        major = struct.unpack("<3H", data[8:14])[0]
        if major != STATE_VERSION[0]:
            raise ValueError(f"unsupported state version {major}")
        z = np.load(io.BytesIO(data[14:]), allow_pickle=False)
        index = PointIndex.from_bytes(z["index"].tobytes())
        lines = json.loads(z["config"].tobytes().decode())
        config = Config.from_mapping(dict(line.split("=", 1) for line in lines))
        palps = PALPTable(z["depth"], z["u_max"], z["eps"], z["diameter"], index.points)
        return cls(index, palps, config)

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> "PreprocessedState":
        return cls.from_bytes(Path(path).read_bytes())


def preprocess(E, config: Config | None = None) -> PreprocessedState:
    return PreprocessedState.build(E, config)


# ------------------------------------------------------------- the function


def _check_data(state: PreprocessedState, f, M: float) -> np.ndarray:
    f = np.asarray(f, dtype=float).reshape(-1)
    if f.size != state.n:
        raise ValueError(f"expected {state.n} data values, got {f.size}")
    if not np.all(np.isfinite(f)) or np.any(f < 0):
        raise ValueError("data values must be finite and nonnegative")
    if not (np.isfinite(M) and M >= 0):
        raise ValueError("M must be finite and nonnegative")
    return f


class Interpolant:
    """The extension of (E, f) at norm level M, evaluated lazily."""

    def __init__(self, state: PreprocessedState, f, M: float):
        self.state = state
        self.f = _check_data(state, f, M)
        self.M = float(M)
        self._cache = TransitionCache()
        self._cache.m1 = state.m1_memo(self.f)
        self._local: dict[int, LocalExtension] = {}

    def transition(self, s: int):
        return transition_jet(self.state.cz, s, self.f, self.M, self._cache)

    def local(self, s: int) -> LocalExtension:
        ext = self._local.get(s)
        if ext is None:
            ext = LocalExtension(self.state.cz, s, self.f, self.M, self._cache)
            self._local[s] = ext
        return ext

    def case_jets(self, s: int, X: np.ndarray) -> np.ndarray | None:
        """Jets of E#_Q at rows of X, or None where E#_Q vanishes."""
        cz = self.state.cz
        if s < 0:
            return None
        cls = cz.cls[s]
        if cls == SHARPSHARP:
            return self.local(s).jets(X)
        if cls == EMPTY_SMALL:
            s = int(cz.mu[s])
        elif cls != SHARP_ONLY:
            return None
        T = self.transition(s)
        if T.is_zero:
            return None
        return singleton_extension_arr(T.jet.base, T.jet.value, T.jet.grad, X)

    def jets(self, X) -> np.ndarray:
        """Stacked two-jets (value, fx, fy, fxx, fxy, fyy) at rows of X."""
        X = np.asarray(X, dtype=float).reshape(-1, 2)
        c = self.state.cover(X)
        out = np.zeros((len(X), 6))
        order = np.argsort(c.sid, kind="stable")
        sids = c.sid[order]
        cuts = np.flatnonzero(np.diff(sids)) + 1
        for grp in np.split(order, cuts):
            if grp.size == 0:
                continue
            q = c.q[grp]
            case = self.case_jets(int(c.sid[grp[0]]), X[q])
            if case is None:
                continue
            np.add.at(out, q, jarr_mul(c.theta[grp], case))
        return out

    def jet(self, x) -> Jet2:
        x = np.asarray(x, dtype=float).reshape(2)
        return Jet2.from_array((float(x[0]), float(x[1])), self.jets(x[None, :])[0])

    def query(self, x) -> tuple[Jet2, np.ndarray]:
        return self.jet(x), self.state.representative_set(x)

    def values(self, X) -> np.ndarray:
        return self.jets(X)[:, 0]


def global_jet(state: PreprocessedState, x, f, M: float) -> Jet2:
    return Interpolant(state, f, M).jet(x)


def representative_set(state: PreprocessedState, x) -> np.ndarray:
    return state.representative_set(x)


def pou_jet(state: PreprocessedState, s: int, x) -> Jet2:
    """Partition weight of square ``s`` at x (zero jet when x is outside its support)."""
    x = np.asarray(x, dtype=float).reshape(2)
    for sid, jet in state.pou_jets(x):
        if sid == s:
            return jet
    return Jet2.zero((float(x[0]), float(x[1])))


# ---------------------------------------------------------- finiteness sets


@dataclass
class FinitenessFamily:
    """One set {a, b} + S(a) + S(b) per ordered pair of representatives."""

    ra: np.ndarray
    rb: np.ndarray
    sx_ptr: np.ndarray
    sx_idx: np.ndarray

    def __len__(self) -> int:
        return self.ra.size

    def _sx(self, i: int) -> np.ndarray:
        return self.sx_idx[self.sx_ptr[i]:self.sx_ptr[i + 1]]

    def members(self, ell: int) -> np.ndarray:
        a, b = int(self.ra[ell]), int(self.rb[ell])
        return np.unique(np.concatenate([[a, b], self._sx(a), self._sx(b)])).astype(np.int64)

    def sizes(self) -> np.ndarray:
        n = self.sx_ptr.size - 1
        _, size = _backend.kernels.pair_union_costs(
            np.zeros((n, 2)), np.zeros(n), np.zeros((n, 2)), self.sx_ptr, self.sx_idx,
            self.ra, self.rb)
        return np.asarray(size)

    def __iter__(self):
        for ell in range(len(self)):
            yield self.members(ell)


def sfp_sets(state: PreprocessedState) -> FinitenessFamily:
    return state.sfp_family()


@dataclass
class TraceNormResult:
    value: float
    best_solved: float  # largest value among the sets minimised
    argmax: int  # set attaining best_solved, -1 if none was minimised
    solved: int
    n_sets: int


def _pilot_field(state: PreprocessedState, f: np.ndarray) -> np.ndarray:
    """Gradients at every point from the best field on its nearest neighbours."""
    grads = np.zeros((state.n, 2))
    memo = state.m1_memo(f)
    for i in np.flatnonzero(f > 0):
        if state.palps.depth_set(i).size == 1:
            continue
        grads[i] = m1_jet(state.palps, int(i), f, state.config.qp_tol, memo).grad
    return grads


def trace_norm_detail(state: PreprocessedState, f, slack: float | None = None) -> TraceNormResult:
    """Largest small-set trace norm over the finiteness sets, within ``slack``.

    Every set is first priced with one fixed field (the pilot field): its
    cost bounds the set's minimum from above.  Sets are then minimised in
    order of decreasing bound.  The loop stops once the next bound is at
    most ``slack`` times the best value found, and the answer is the larger
    of that best value and the next bound.  Writing T for the maximum over
    all sets of min(pilot cost, minimum), the answer V obeys
    T <= V <= slack * T; with slack = 1 it is T itself.
    """
    f = _check_data(state, f, 0.0)
    slack = state.config.tn_slack if slack is None else float(slack)
    if slack < 1:
        raise ValueError("slack must be at least 1")
    if state.n == 1:
        return TraceNormResult(float(f[0]), float(f[0]), -1, 0, 0)
    fam = state.sfp_family()
    half = len(fam) // 2  # the second half repeats the first with the pair swapped
    grads = _pilot_field(state, f)
    pts = state.points
    upper, _ = _backend.kernels.pair_union_costs(
        pts, f, grads, fam.sx_ptr, fam.sx_idx, fam.ra[:half], fam.rb[:half])
    upper = np.asarray(upper)
    order = np.argsort(-upper, kind="stable")
    best, arg, solved = 0.0, -1, 0
    rest = 0.0
    for pos, ell in enumerate(order):
        if upper[ell] <= slack * best:
            rest = float(upper[ell])
            break
        S = fam.members(int(ell))
        value = small_trace_norm(pts[S], f[S], max_points=None, tol=state.config.qp_tol,
                                 polish=False).value
        value = min(value, float(upper[ell]))
        solved += 1
        if value > best:
            best, arg = value, int(ell)
    return TraceNormResult(max(best, rest), best, arg, solved, half)


def trace_norm(state: PreprocessedState, f, slack: float | None = None) -> float:
    return trace_norm_detail(state, f, slack).value
