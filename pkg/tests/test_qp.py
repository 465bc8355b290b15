import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from c2plus.qp import (QuadL1Problem, eliminate_affine, objective_value, solve_kkt_enumeration,
                       solve_lp, solve_quad_l1)


def random_problem(rng, d, m, constrained=False, degenerate=False):
    A = rng.normal(size=(d, d))
    if degenerate and d > 1:
        A[:, 0] = 0.0
    Q = A @ A.T * rng.uniform(0.05, 2.0)
    q = rng.normal(size=d) * (0.0 if degenerate else 1.0)
    L = rng.normal(size=(m, d))
    c = rng.normal(size=m)
    B = b = None
    if constrained and d > 1:
        j = int(rng.integers(1, d))
        B = rng.normal(size=(j, d))
        b = rng.normal(size=j)
    return QuadL1Problem(Q, q, L, c, B, b)


def close(a, b, rel=1e-5):
    return abs(a - b) <= rel * (1.0 + abs(b))


# -- affine elimination ---------------------------------------------------------------


def test_eliminate_full_constraint():
    v = np.array([1.0, -2.0, 3.0])
    p = QuadL1Problem(np.eye(3), None, np.eye(3), np.zeros(3), np.eye(3), v)
    reduced, red = eliminate_affine(p)
    assert reduced.dim == 0
    np.testing.assert_allclose(red.reconstruct(np.zeros(0)), v, atol=1e-12)


def test_eliminate_sum_constraint():
    p = QuadL1Problem(np.eye(2), None, np.eye(2), np.zeros(2), np.ones((1, 2)), [1.0])
    reduced, red = eliminate_affine(p)
    assert reduced.dim == 1
    for z in (-3.0, 0.0, 2.5):
        beta = red.reconstruct([z])
        assert abs(beta.sum() - 1.0) <= 1e-12
        # objectives agree along the parametrisation
        assert close(objective_value(reduced, [z]), objective_value(p, beta), 1e-12)


def test_eliminate_random_residual():
    rng = np.random.default_rng(0)
    for _ in range(50):
        d = int(rng.integers(2, 8))
        j = int(rng.integers(1, d + 1))
        B, b = rng.normal(size=(j, d)), rng.normal(size=j)
        p = QuadL1Problem(np.eye(d), None, np.eye(d), np.zeros(d), B, b)
        _, red = eliminate_affine(p)
        z = rng.normal(size=red.N.shape[1])
        assert np.linalg.norm(B @ red.reconstruct(z) - b) <= 1e-10


def test_eliminate_infeasible():
    B = np.array([[1.0, 1.0], [1.0, 1.0]])
    p = QuadL1Problem(np.eye(2), None, np.eye(2), np.zeros(2), B, [0.0, 1.0])
    reduced, _ = eliminate_affine(p)
    assert reduced is None
    assert solve_quad_l1(p).status == "infeasible"


# -- worked examples -------------------------------------------------------------------


def test_fully_constrained_one_variable():
    p = QuadL1Problem([[1.0]], None, [[1.0]], [0.0], [[1.0]], [2.0])
    for sol in (solve_quad_l1(p), solve_kkt_enumeration(p)):
        assert sol.status == "optimal"
        assert sol.beta[0] == pytest.approx(2.0, abs=1e-12)
        assert sol.objective == pytest.approx(6.0, abs=1e-12)


def test_symmetric_two_variable():
    p = QuadL1Problem(np.eye(2), None, np.eye(2), np.zeros(2), np.ones((1, 2)), [1.0])
    for sol in (solve_quad_l1(p), solve_kkt_enumeration(p)):
        np.testing.assert_allclose(sol.beta, [0.5, 0.5], atol=1e-9)
        assert sol.objective == pytest.approx(1.5, abs=1e-9)


def test_linear_term_with_kink():
    # b1^2 - 3 b1 + |b1| + b2^2 + |b2| is minimised at (1, 0) with value -1
    p = QuadL1Problem(np.eye(2), [-3.0, 0.0], np.eye(2), np.zeros(2))
    for sol in (solve_quad_l1(p), solve_kkt_enumeration(p)):
        np.testing.assert_allclose(sol.beta, [1.0, 0.0], atol=1e-9)
        assert sol.objective == pytest.approx(-1.0, abs=1e-9)


def test_pure_l1_at_origin():
    p = QuadL1Problem(np.zeros((3, 3)), None, np.eye(3), np.zeros(3))
    sol = solve_quad_l1(p)
    np.testing.assert_allclose(sol.beta, 0.0, atol=1e-9)
    assert sol.objective == pytest.approx(0.0, abs=1e-9)


def test_enumeration_limits():
    p = QuadL1Problem(np.eye(9), None, np.eye(9), np.zeros(9))
    with pytest.raises(ValueError):
        solve_kkt_enumeration(p)


def test_rejects_indefinite():
    with pytest.raises(ValueError):
        QuadL1Problem(np.diag([1.0, -1.0]), None, np.eye(2), np.zeros(2))


# -- oracle agreement and structural properties ------------------------------------------


def test_oracle_agreement_random():
    rng = np.random.default_rng(1)
    worst = 0.0
    for k in range(200):
        d = int(rng.integers(1, 7))
        m = int(rng.integers(1, 7))
        p = random_problem(rng, d, m, constrained=k % 3 == 0, degenerate=k % 7 == 0)
        a = solve_quad_l1(p)
        b = solve_kkt_enumeration(p)
        assert a.status == b.status == "optimal"
        gap = abs(a.objective - b.objective) / (1.0 + abs(b.objective))
        worst = max(worst, gap)
    assert worst <= 1e-5, worst


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_extra_constraint_never_lowers_optimum(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 6))
    p = random_problem(rng, d, int(rng.integers(1, 6)))
    row = rng.normal(size=(1, d))
    tighter = QuadL1Problem(p.Q, p.q, p.L, p.c, row, rng.normal(size=1))
    assert solve_quad_l1(tighter).objective >= solve_quad_l1(p).objective - 1e-7 * (1 + abs(solve_quad_l1(p).objective))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.1, 10.0))
def test_pure_l1_positively_homogeneous(seed, s):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 5))
    L = rng.normal(size=(d + 2, d))
    c = rng.normal(size=d + 2)
    q = 0.1 * rng.normal(size=d)
    p = QuadL1Problem(np.zeros((d, d)), q, L, c)
    ps = QuadL1Problem(np.zeros((d, d)), s * q, s * L, s * c)
    a, b = solve_quad_l1(p).objective, solve_quad_l1(ps).objective
    assert abs(b - s * a) <= 1e-7 * (1 + abs(b))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_solution_respects_constraints(seed):
    rng = np.random.default_rng(seed)
    p = random_problem(rng, 4, 4, constrained=True)
    sol = solve_quad_l1(p)
    assert np.abs(p.B @ sol.beta - p.b).max() <= 1e-9 * (1 + np.abs(p.b).max())
    assert sol.objective == pytest.approx(objective_value(p, sol.beta), rel=1e-12, abs=1e-12)


# -- linear programs -------------------------------------------------------------------


def test_lp_examples():
    assert solve_lp([1.0], G=[[1.0]], h=[1.0]).value == pytest.approx(1.0)
    assert solve_lp([1.0, 1.0], G=np.eye(2), h=[1.0, 2.0]).value == pytest.approx(3.0)


def test_lp_unbounded_and_infeasible():
    assert solve_lp([1.0], G=[[-1.0]], h=[0.0]).status == "unbounded"
    assert solve_lp([1.0], G=[[1.0], [-1.0]], h=[-1.0, -1.0]).status == "infeasible"


def vertex_oracle(c, G, h):
    best = -np.inf
    for i, j in itertools.combinations(range(len(G)), 2):
        M = G[[i, j]]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        z = np.linalg.solve(M, h[[i, j]])
        if np.all(G @ z <= h + 1e-9):
            best = max(best, float(c @ z))
    return best


def test_lp_against_vertex_enumeration():
    rng = np.random.default_rng(2)
    for _ in range(100):
        extra = int(rng.integers(0, 3))
        box = np.vstack([np.eye(2), -np.eye(2)])
        G = np.vstack([box, rng.normal(size=(extra, 2))])
        h = np.concatenate([rng.uniform(0.5, 2.0, 4), rng.uniform(0.1, 2.0, extra)])
        c = rng.normal(size=2)
        res = solve_lp(c, G=G, h=h)
        assert res.status == "optimal"
        assert res.value == pytest.approx(vertex_oracle(c, G, h), abs=1e-8)


def test_lp_equality_rows():
    res = solve_lp([1.0, 2.0], G=np.eye(2), h=[5.0, 5.0], A=[[1.0, 1.0]], a=[3.0])
    assert res.value == pytest.approx(8.0)
    np.testing.assert_allclose(res.z, [-2.0, 5.0], atol=1e-9)
