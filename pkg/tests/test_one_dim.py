import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from c2plus.one_dim import (LinearOperator, NonnegOperator, SortedSamples, depth_set_1d,
                            oned_base_nonneg, oned_linear_jet, oned_nonneg_jet, ramp)


def random_samples(rng, n, nonneg=True):
    t = np.sort(rng.uniform(-1, 1, n))
    while np.any(np.diff(t) <= 0):
        t = np.sort(rng.uniform(-1, 1, n))
    v = rng.random(n) ** 2 if nonneg else rng.normal(size=n)
    if nonneg:
        v[rng.random(n) < 0.2] = 0.0
    return SortedSamples(t, v)


# -- the depth table ---------------------------------------------------------------


def test_depth_set_cases():
    t = np.arange(10.0)
    assert depth_set_1d(t[:2], 5.0).tolist() == [0, 1]
    assert depth_set_1d(t[:3], -5.0).tolist() == [0, 1, 2]
    assert depth_set_1d(t, -1.0).tolist() == [0, 1, 2]
    assert depth_set_1d(t, 0.5).tolist() == [0, 1, 2]
    assert depth_set_1d(t, 3.5).tolist() == [2, 3, 4, 5]
    assert depth_set_1d(t, 8.5).tolist() == [7, 8, 9]
    assert depth_set_1d(t, 20.0).tolist() == [7, 8, 9]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 25), st.integers(0, 10_000), st.floats(-1.5, 1.5), st.booleans())
def test_jet_reads_only_depth_set(n, seed, s, linear):
    rng = np.random.default_rng(seed)
    smp = random_samples(rng, n, nonneg=not linear)
    Op = LinearOperator if linear else NonnegOperator
    keep = depth_set_1d(smp, s)
    v2 = smp.v.copy()
    out = np.setdiff1d(np.arange(n), keep)
    v2[out] = rng.random(out.size) * 3
    a = Op(smp).jets([s])
    b = Op(SortedSamples(smp.t, v2)).jets([s])
    assert np.array_equal(a, b)


# -- the nonnegative operator ------------------------------------------------------------


def test_base_examples():
    z = oned_base_nonneg(([0.0, 1.0, 2.0], [0.0, 0.0, 0.0]), 0.7)
    assert (z.value, z.d1, z.d2) == (0.0, 0.0, 0.0)
    one = oned_base_nonneg(([0.3], [1.0]), 2.0)
    assert (one.value, one.d1, one.d2) == (1.0, 0.0, 0.0)
    t = np.array([0.0, 1.0, 2.0])
    op = NonnegOperator(SortedSamples(t, t ** 2))
    np.testing.assert_allclose(op.values(t), t ** 2, atol=1e-12)
    assert op.values(np.linspace(-5, 7, 10_000)).min() >= 0.0
    with pytest.raises(ValueError):
        oned_base_nonneg((np.arange(4.0), np.ones(4)), 0.0)


def test_three_points_is_one_window():
    smp = SortedSamples([0.0, 0.4, 1.0], [1.0, 0.2, 0.5])
    for s in (-1.0, 0.2, 0.7, 3.0):
        a = oned_nonneg_jet(smp, s)
        b = oned_base_nonneg(smp, s)
        assert (a.value, a.d1, a.d2) == (b.value, b.d1, b.d2)


def test_rejects_negative_and_unsorted():
    with pytest.raises(ValueError):
        NonnegOperator(SortedSamples([0.0, 1.0], [1.0, -1.0]))
    with pytest.raises(ValueError):
        SortedSamples([1.0, 0.0], [1.0, 1.0])


@pytest.mark.parametrize("seed", range(5))
def test_interpolation_and_nonnegativity(seed):
    rng = np.random.default_rng(seed)
    smp = random_samples(rng, 20)
    op = NonnegOperator(smp)
    scale = 1 + np.abs(smp.v).max()
    assert np.abs(op.values(smp.t) - smp.v).max() <= 1e-10 * scale
    grid = np.linspace(-1.5, 1.5, 100_001)
    assert op.values(grid).min() >= -1e-10 * scale


def test_norm_stability_against_generators():
    rng = np.random.default_rng(6)
    s = np.linspace(-1.2, 1.2, 20_001)
    worst = 0.0
    for k in range(100):
        n = int(rng.integers(2, 30))
        t = np.sort(rng.uniform(-1, 1, n))
        a, b, c, w = rng.normal(size=4)
        if k % 2:
            G = (np.sin(w * s + b) ** 2, w * np.sin(2 * (w * s + b)), 2 * w * w * np.cos(2 * (w * s + b)))
            v = np.sin(w * t + b) ** 2
        else:
            G = ((a * s + b) ** 2 + 0.1 * abs(c), 2 * a * (a * s + b), 2 * a * a + 0 * s)
            v = (a * t + b) ** 2 + 0.1 * abs(c)
        J = NonnegOperator(SortedSamples(t, v)).jets(s)
        worst = max(worst, np.abs(J).max() / max(np.abs(g).max() for g in G))
    assert worst <= 100, worst


# -- the linear operator --------------------------------------------------------------


def test_linear_zero_and_affine():
    rng = np.random.default_rng(7)
    t = np.sort(rng.uniform(-1, 1, 12))
    z = LinearOperator(SortedSamples(t, np.zeros(12))).jets(np.linspace(-2, 2, 50))
    assert np.all(z == 0)
    a, b = 1.7, -0.4
    J = LinearOperator(SortedSamples(t, a * t + b)).jets(np.linspace(-2, 2, 200))
    s = np.linspace(-2, 2, 200)
    np.testing.assert_allclose(J[:, 0], a * s + b, atol=1e-12)
    np.testing.assert_allclose(J[:, 1], a, atol=1e-11)
    np.testing.assert_allclose(J[:, 2], 0.0, atol=1e-9)
    j = oned_linear_jet((t, a * t + b), 0.1)
    assert j.value == pytest.approx(a * 0.1 + b, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 20), st.integers(0, 10_000), st.floats(-3, 3))
def test_linearity(n, seed, c):
    rng = np.random.default_rng(seed)
    smp = random_samples(rng, n, nonneg=False)
    w = rng.normal(size=n)
    s = np.linspace(-1.3, 1.3, 101)
    Jv = LinearOperator(smp).jets(s)
    Jw = LinearOperator(SortedSamples(smp.t, w)).jets(s)
    Jsum = LinearOperator(SortedSamples(smp.t, smp.v + c * w)).jets(s)
    scale = 1 + np.abs(Jv).max() + abs(c) * np.abs(Jw).max()
    assert np.abs(Jsum - (Jv + c * Jw)).max() <= 1e-10 * scale


def test_linear_interpolation():
    rng = np.random.default_rng(8)
    smp = random_samples(rng, 30, nonneg=False)
    op = LinearOperator(smp)
    assert np.abs(op.values(smp.t) - smp.v).max() <= 1e-10 * (1 + np.abs(smp.v).max())


# -- blending -------------------------------------------------------------------------


def test_ramp_is_c2_with_flat_ends():
    u = np.linspace(-0.5, 1.5, 2001)
    val, d1, d2 = ramp(u)
    assert np.all(val[u <= 0.25] == 0) and np.all(val[u >= 0.75] == 1)
    assert np.all(np.diff(val) >= 0)
    h = 1e-6
    # the third derivative jumps at the plateau edges, so keep h tiny
    vp, d1p, _ = ramp(u + h)
    vm, d1m, _ = ramp(u - h)
    np.testing.assert_allclose((vp - vm) / (2 * h), d1, atol=1e-6)
    np.testing.assert_allclose((d1p - d1m) / (2 * h), d2, atol=1e-3)


def test_at_most_two_windows_active():
    rng = np.random.default_rng(9)
    smp = random_samples(rng, 15)
    # perturbing a sample changes the jet only where its windows live
    for i in range(15):
        v2 = smp.v.copy()
        v2[i] += 1.0
        s = np.linspace(-1.5, 1.5, 3001)
        diff = np.any(NonnegOperator(smp).jets(s) != NonnegOperator(SortedSamples(smp.t, v2)).jets(s), axis=1)
        touched = s[diff]
        if touched.size:
            lo = smp.t[max(i - 2, 0)] if i > 2 else -np.inf
            hi = smp.t[min(i + 2, 14)] if i < 12 else np.inf
            assert touched.min() >= lo and touched.max() <= hi
