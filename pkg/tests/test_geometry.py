import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial.distance import cdist

from c2plus.geometry import DyadicSquare, PointIndex, build_index, build_wspd


def adversarial_sets():
    rng = np.random.default_rng(0)
    yield "uniform", rng.random((300, 2))
    c = rng.random((3, 2))
    yield "clusters", np.unique(c[rng.integers(0, 3, 300)] + 1e-3 * rng.normal(size=(300, 2)), axis=0)
    g = np.arange(17) / 16.0
    yield "grid", np.stack(np.meshgrid(g, g), -1).reshape(-1, 2)
    t = np.sort(rng.random(200))
    yield "line", np.column_stack([t, 0.5 + 0 * t])
    yield "geometric", np.column_stack([2.0 ** -np.arange(40.0), np.zeros(40)])


def brute_dilated(E, Q, lam):
    lo, hi = Q.dilated_bounds(lam)
    inside = np.all((E >= lo) & (E < hi), axis=1)
    return np.flatnonzero(inside)


def check_wspd(E, kappa):
    idx = PointIndex(E)
    W = idx.build_wspd(kappa)
    n = len(E)
    seen = np.zeros((n, n), dtype=np.int64)
    D = cdist(E, E)
    worst = 0.0
    for ell in range(len(W)):
        A, B = W.left(ell), W.right(ell)
        seen[np.ix_(A, B)] += 1
        dist = D[np.ix_(A, B)].min()
        diam = max(D[np.ix_(A, A)].max(), D[np.ix_(B, B)].max())
        worst = max(worst, diam / dist)
        assert W.rep_left[ell] in A and W.rep_right[ell] in B
        lexA = A[np.lexsort((E[A, 1], E[A, 0]))[0]]
        assert W.rep_left[ell] == lexA
    off = ~np.eye(n, dtype=bool)
    assert np.all(seen[off] == 1) and np.all(seen[~off] == 0)
    assert worst <= kappa
    assert set(W.rep_left.tolist()) == set(range(n))
    return W


@pytest.mark.parametrize("name,E", list(adversarial_sets()), ids=lambda v: v if isinstance(v, str) else "")
def test_wspd_partition_and_separation(name, E):
    check_wspd(E, 1 / 16)


def test_wspd_small_cases():
    assert len(build_wspd(build_index([[0.0, 0.0]]), 0.1)) == 0
    W = build_wspd(build_index([[0.0, 0.0], [1.0, 2.0]]), 0.01)
    assert len(W) == 2
    assert {(int(W.left(k)[0]), int(W.right(k)[0])) for k in range(2)} == {(0, 1), (1, 0)}


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 60), st.integers(0, 10_000), st.sampled_from([0.1, 0.25, 0.5, 1.0]))
def test_wspd_property(n, seed, kappa):
    E = np.unique(np.random.default_rng(seed).random((n, 2)), axis=0)
    check_wspd(E, kappa)


def test_wspd_size_ratio():
    for name, E in adversarial_sets():
        W = PointIndex(E).build_wspd(1 / 16)
        assert len(W) <= 400 * len(E), name


def test_index_rejects_duplicates_and_nonfinite():
    with pytest.raises(ValueError):
        PointIndex([[0, 0], [0, 0]])
    with pytest.raises(ValueError):
        PointIndex([[0, np.nan]])


def test_index_small():
    idx = build_index([[0.3, 0.7]])
    assert idx.n == 1
    assert idx.k_nearest_indices([5, 5], 3).tolist() == [0]
    idx = build_index([[0.0, 0.0], [1.0, 1.0]])
    assert idx.split_tree.left[0] >= 0  # the root splits once
    assert idx.n == 2


def test_point_location_exhaustive():
    E = np.random.default_rng(1).random((1000, 2))
    idx = build_index(E)
    for i in range(0, 1000, 7):
        Q = DyadicSquare.containing(E[i], -12)
        assert i in idx.points_in_dilated(Q, 1.0)
        assert idx.k_nearest_indices(E[i], 1)[0] == i


def test_empty_and_rep_against_brute_force():
    rng = np.random.default_rng(2)
    E = rng.random((200, 2))
    idx = build_index(E)
    for _ in range(500):
        k = int(rng.integers(-9, 1))
        c = rng.uniform(-1.5, 2.5, 2)
        Q = DyadicSquare.containing(c, k)
        in25 = brute_dilated(E, Q, 25.0)
        in5 = brute_dilated(E, Q, 5.0)
        assert idx.empty_query(Q) == (in25.size == 0)
        r, flag = idx.rep_query(Q)
        if in25.size == 0:
            assert r is None
            continue
        assert r in in25
        assert flag == (in5.size > 0)
        if in5.size:
            assert r in in5
            assert r == in5[np.lexsort((E[in5, 1], E[in5, 0]))[0]]


def test_rep_outside_five():
    E = np.array([[9.0, 0.5]])
    Q = DyadicSquare(0, 0, 0)
    assert build_index(E).rep_query(Q) == (0, False)
    assert build_index(E).empty_query(DyadicSquare(0, 100, 100))


def test_points_in_dilated_brute_force():
    rng = np.random.default_rng(3)
    E = rng.random((300, 2))
    idx = build_index(E)
    for _ in range(200):
        Q = DyadicSquare.containing(rng.random(2), int(rng.integers(-6, 0)))
        lam = float(rng.choice([1.0, 1.0 + 1 / 32, 3.0, 5.0]))
        np.testing.assert_array_equal(np.sort(idx.points_in_dilated(Q, lam)), brute_dilated(E, Q, lam))


def test_k_nearest_brute_force_and_ties():
    rng = np.random.default_rng(4)
    g = np.arange(6) / 5.0
    E = np.stack(np.meshgrid(g, g), -1).reshape(-1, 2)  # many exact ties
    idx = build_index(E)
    for _ in range(100):
        x = E[rng.integers(len(E))] if rng.random() < 0.5 else rng.random(2)
        k = int(rng.integers(1, 12))
        d = np.hypot(*(E - x).T)
        want = np.lexsort((E[:, 1], E[:, 0], d))[:k]
        np.testing.assert_array_equal(idx.k_nearest_indices(x, k), want)
    assert idx.k_nearest_indices([0.5, 0.5], 100).size == len(E)


def test_knn_all_matches_single_queries():
    E = np.random.default_rng(5).random((150, 2))
    idx = build_index(E)
    nb = idx.knn_all(16)
    for i in range(0, 150, 5):
        np.testing.assert_array_equal(nb[i], idx.k_nearest_indices(E[i], 16))


def test_dyadic_square_relations():
    Q = DyadicSquare(-2, 3, -1)
    assert Q.side == 0.25
    assert Q.parent() == DyadicSquare(-1, 1, -1)
    assert all(c.parent() == Q for c in Q.children())
    lo, hi = Q.dilated_bounds(3.0)
    np.testing.assert_allclose(hi - lo, 0.75)
    assert Q.contains(Q.lo) and not Q.contains(Q.lo + Q.side)


def test_index_round_trip():
    E = np.random.default_rng(6).random((100, 2))
    idx = build_index(E)
    data = idx.to_bytes()
    back = PointIndex.from_bytes(data)
    assert back.to_bytes() == data
    np.testing.assert_array_equal(back.points, idx.points)
    with pytest.raises(ValueError):
        PointIndex.from_bytes(b"garbage" + data)
