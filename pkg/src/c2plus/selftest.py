"""Quick invariant checks run by ``c2plus selftest``."""

from __future__ import annotations

import time

import numpy as np

from . import _backend
from .config import Config
from .cz import SHARP_ONLY
from .extension import Interpolant, PreprocessedState, trace_norm_detail
from .one_dim import NonnegOperator, SortedSamples
from .qp import QuadL1Problem, solve_kkt_enumeration, solve_quad_l1


def _random_problem(rng, d, m):
    A = rng.normal(size=(d, d))
    Q = A @ A.T * rng.uniform(0.1, 1.0)
    return QuadL1Problem(Q, rng.normal(size=d), rng.normal(size=(m, d)), rng.normal(size=m))


def _checks(cfg: Config, rng):
    for _ in range(20):
        p = _random_problem(rng, int(rng.integers(1, 4)), int(rng.integers(1, 5)))
        a, b = solve_quad_l1(p).objective, solve_kkt_enumeration(p).objective
        if abs(a - b) > 1e-5 * max(1.0, abs(b)):
            yield "qp-vs-enumeration", False, f"gap {abs(a - b):.3g}"
            break
    else:
        yield "qp-vs-enumeration", True, "20 instances"

    t = np.sort(rng.random(12))
    v = rng.random(12) ** 2
    op = NonnegOperator(SortedSamples(t, v))
    s = np.linspace(t[0] - 0.2, t[-1] + 0.2, 2001)
    err = float(np.abs(op.values(t) - v).max())
    low = float(op.values(s).min())
    yield "one-dim", err <= 1e-10 and low >= -1e-12, f"interp err {err:.2g}, min {low:.3g}"

    E = rng.random((60, 2))
    f = (1.0 + E[:, 0] * E[:, 1]) ** 2
    state = PreprocessedState.build(E, cfg)

    W = state.wspd()
    seen = np.zeros((state.n, state.n), dtype=np.int64)
    for ell in range(len(W)):
        A, B = W.left(ell), W.right(ell)
        seen[np.ix_(A, B)] += 1
    off = ~np.eye(state.n, dtype=bool)
    yield "wspd-cover", bool(np.all(seen[off] == 1) and np.all(seen[~off] == 0)), f"{len(W)} pairs"

    cz = state.cz
    d_e, _ = state.index.kd.query(cz.x_sharp)
    sharp = cz.cls >= SHARP_ONLY
    ok = bool(np.all(d_e[sharp] >= cfg.c0 * cz.side[sharp]))
    yield "x-sharp-distance", ok, f"{len(cz)} squares"

    res = trace_norm_detail(state, f)
    M = res.value
    F = Interpolant(state, f, M)
    err = float(np.abs(F.values(E) - f).max())
    yield "interpolation", err <= 1e-9 * (1 + M), f"M {M:.4g}, max err {err:.2g}"

    g = np.linspace(-0.25, 1.25, 50)
    X = np.stack(np.meshgrid(g, g), axis=-1).reshape(-1, 2)
    low = float(F.values(X).min())
    yield "nonnegativity", low >= -1e-8 * M, f"grid min {low:.3g}"

    c = state.cover(X)
    tot = np.zeros((len(X), 6))
    np.add.at(tot, c.q, c.theta)
    dev = float(np.abs(tot - np.array([1, 0, 0, 0, 0, 0])).max() / (1 + np.abs(c.theta).max()))
    yield "partition-of-unity", dev <= 1e-10, f"relative deviation {dev:.2g}"


def run_selftest(cfg: Config, out, seed: int = 0) -> bool:
    print(f"backend={_backend.NAME}", file=out)
    for line in cfg.to_lines():
        print(line, file=out)
    rng = np.random.default_rng(seed)
    all_ok = True
    t0 = time.perf_counter()
    for name, ok, detail in _checks(cfg, rng):
        all_ok &= ok
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}", file=out)
    print(f"{'ok' if all_ok else 'FAILED'} in {time.perf_counter() - t0:.1f}s", file=out)
    return all_ok
