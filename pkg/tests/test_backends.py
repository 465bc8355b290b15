"""The compiled kernels and the numpy fallback must agree."""

import numpy as np
import pytest

from c2plus import _backend, _pure, preprocess, trace_norm
from c2plus.extension import Interpolant
from c2plus.qp import QuadL1Problem, solve_quad_l1

from conftest import dataset

compiled = pytest.importorskip("c2plus._cython._core")


@pytest.fixture
def restore_backend():
    name = _backend.NAME
    yield
    _backend.use(name)


def run_pipeline(backend):
    _backend.use(backend)
    E, f = dataset(21, 50, clustered=True)
    state = preprocess(E)
    M = trace_norm(state, f)
    X = np.random.default_rng(0).uniform(-0.2, 1.2, (300, 2))
    W = state.wspd()
    return state, M, Interpolant(state, f, M).jets(X), (W.rep_left.copy(), W.rep_right.copy())


def test_pipeline_parity(restore_backend):
    a_state, a_M, a_J, a_W = run_pipeline("pure")
    b_state, b_M, b_J, b_W = run_pipeline("cython")
    np.testing.assert_allclose(a_state.palps.eps, b_state.palps.eps, rtol=1e-9)
    np.testing.assert_array_equal(a_state.palps.depth, b_state.palps.depth)
    np.testing.assert_array_equal(a_state.cz.K, b_state.cz.K)
    np.testing.assert_array_equal(a_state.cz.cls, b_state.cz.cls)
    np.testing.assert_array_equal(a_W[0], b_W[0])
    np.testing.assert_array_equal(a_W[1], b_W[1])
    assert a_M == pytest.approx(b_M, rel=1e-7)
    scale = 1 + np.abs(a_J).max()
    assert np.abs(a_J - b_J).max() <= 1e-7 * scale


def test_cost_kernels_identical():
    rng = np.random.default_rng(1)
    n = 30
    pts, vals, grads = rng.random((n, 2)), rng.random(n), rng.normal(size=(n, 2))
    sizes = rng.integers(1, 6, n)
    ptr = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
    idx = np.concatenate([np.sort(rng.choice(n, k, replace=False)) for k in sizes]).astype(np.int64)
    ra, rb = rng.integers(0, n, 40).astype(np.int64), rng.integers(0, n, 40).astype(np.int64)
    for name in ("pair_union_costs",):
        p = getattr(_pure, name)(pts, vals, grads, ptr, idx, ra, rb)
        c = getattr(compiled, name)(pts, vals, grads, ptr, idx, ra, rb)
        np.testing.assert_allclose(np.asarray(p[0]), np.asarray(c[0]), rtol=1e-12)
        np.testing.assert_array_equal(np.asarray(p[1]), np.asarray(c[1]))
    p = _pure.field_set_costs(pts, vals, grads, ptr, idx)
    c = compiled.field_set_costs(pts, vals, grads, ptr, idx)
    np.testing.assert_allclose(np.asarray(p), np.asarray(c), rtol=1e-12)


def test_qp_parity(restore_backend):
    rng = np.random.default_rng(2)
    for _ in range(30):
        d = int(rng.integers(1, 6))
        A = rng.normal(size=(d, d))
        Q = A @ A.T + 0.1 * np.eye(d)
        q = rng.normal(size=d)
        L = rng.normal(size=(int(rng.integers(1, 5)), d))
        problem = QuadL1Problem(Q, q, L, rng.random(L.shape[0]))
        out = []
        for name in ("pure", "cython"):
            _backend.use(name)
            out.append(solve_quad_l1(problem).objective)
        assert out[0] == pytest.approx(out[1], rel=1e-7, abs=1e-9)


def test_unknown_backend():
    with pytest.raises(ValueError):
        _backend.use("fortran")
