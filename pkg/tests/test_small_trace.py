import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from c2plus.jets import WhitneyField, m_functional, q_functional, wplus_norm
from c2plus.qp import objective_value
from c2plus.small_trace import (SmallTraceInstance, assemble_quad_l1, m0_minimize, m1_minimize,
                                small_trace_norm)


def random_instance(rng, n, zeros=0.3):
    S = rng.random((n, 2))
    f = rng.random(n) * 2
    f[rng.random(n) < zeros] = 0.0
    return S, f


def test_assemble_single_point():
    p, vmap = assemble_quad_l1(SmallTraceInstance([[0, 0]], [0.0]))
    assert p.dim == 0
    p, vmap = assemble_quad_l1(SmallTraceInstance([[0, 0]], [1.0]))
    assert p.dim == 2
    np.testing.assert_array_equal(p.Q, np.eye(2))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10_000), st.booleans())
def test_assembly_reproduces_functionals(n, seed, pinned):
    rng = np.random.default_rng(seed)
    S, f = random_instance(rng, n)
    pin = rng.random(2) + 2.0 if pinned else None
    p, vmap = assemble_quad_l1(SmallTraceInstance(S, f, pin))
    beta = rng.normal(size=p.dim)
    F = vmap.field(beta)
    exact = q_functional(F) + m_functional(F)
    assert objective_value(p, beta) == pytest.approx(exact, rel=1e-12, abs=1e-12)


def test_rejects_bad_instances():
    with pytest.raises(ValueError):
        SmallTraceInstance([[0, 0]], [-1.0])
    with pytest.raises(ValueError):
        SmallTraceInstance([[0, 0], [0, 0]], [1.0, 1.0])
    with pytest.raises(ValueError):
        SmallTraceInstance([[0, 0]], [1.0], pin=[0, 0])
    with pytest.raises(ValueError):
        small_trace_norm(np.random.default_rng(0).random((30, 2)), np.ones(30))


def test_small_trace_examples():
    z = small_trace_norm([[0, 0], [1, 1]], [0.0, 0.0])
    assert z.value == 0 and np.all(z.minimizer.grads == 0)
    assert small_trace_norm([[0, 0]], [1.0]).value == pytest.approx(1.0, abs=1e-9)


def test_two_points_against_grid():
    S = np.array([[0.0, 0.0], [1.0, 0.0]])
    f = np.array([0.0, 4.0])
    est = small_trace_norm(S, f).value
    g = np.linspace(-10, 10, 801)
    best = np.inf
    for gy in g[::4]:
        F = [q_functional(WhitneyField.from_arrays(S, f, [[0, 0], [gx, gy]]))
             + m_functional(WhitneyField.from_arrays(S, f, [[0, 0], [gx, gy]])) for gx in g]
        best = min(best, min(F))
    assert best <= est * 1.01 and est <= best * 1.01


def test_m0_zero_data():
    r = m0_minimize([[0, 0], [1, 0]], [0.0, 0.0], pin=[0.5, 0.5])
    assert r.value == 0


def test_m1_single_point_matches_norm():
    for v in (0.0, 0.3, 2.0):
        assert m1_minimize([[0.2, 0.1]], [v]).value == pytest.approx(
            small_trace_norm([[0.2, 0.1]], [v]).value, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10_000))
def test_pinning_only_raises_value(n, seed):
    rng = np.random.default_rng(seed)
    S, f = random_instance(rng, n)
    pin = S.mean(axis=0) + rng.normal(size=2) * 0.3
    v0 = m0_minimize(S, f, pin).value
    v1 = m1_minimize(S, f).value
    assert v0 >= v1 * (1 - 1e-6) - 1e-9


def test_minimizer_norm_equivalence():
    rng = np.random.default_rng(3)
    worst = 1.0
    for _ in range(60):
        n = int(rng.integers(1, 7))
        S, f = random_instance(rng, n, zeros=0.0)
        est = small_trace_norm(S, f)
        w = wplus_norm(est.minimizer)
        worst = max(worst, est.value / w, w / est.value)
    assert worst <= 50, worst


def test_generator_jets_bound_the_value():
    rng = np.random.default_rng(4)
    for _ in range(30):
        S = rng.random((int(rng.integers(2, 10)), 2))
        x, y = S[:, 0], S[:, 1]
        f = (1 + x * y) ** 2
        grads = np.column_stack([2 * (1 + x * y) * y, 2 * (1 + x * y) * x])
        F0 = WhitneyField.from_arrays(S, f, grads)
        proxy = q_functional(F0) + m_functional(F0)
        # the generator's own jets are feasible, so the minimum lies below
        assert small_trace_norm(S, f).value <= proxy * (1 + 1e-6)


def test_minimizer_has_prescribed_values_and_zero_gradients_at_zeros():
    rng = np.random.default_rng(5)
    S, f = random_instance(rng, 8, zeros=0.4)
    F = small_trace_norm(S, f).minimizer
    np.testing.assert_array_equal(F.values, f)
    assert np.all(F.grads[f == 0] == 0)
