import numpy as np
import pytest
from scipy.spatial import cKDTree

from c2plus import Config, preprocess
from c2plus.cz import EMPTY_SMALL, OTHER, SHARP_ONLY, SHARPSHARP
from c2plus.geometry import DyadicSquare

from oracles import containing_counts, cz_violations, neighbour_ratio, points_in_box, sharp_slab_ratio


@pytest.fixture(scope="module")
def state():
    rng = np.random.default_rng(0)
    return preprocess(rng.random((120, 2)))


def test_is_ok_examples(state):
    cz = state.cz
    assert not cz.is_ok(DyadicSquare(1, 0, 0))  # larger than the cutoff
    assert cz.is_ok(DyadicSquare(0, 50, 50))  # cutoff size, nothing in 5Q
    pair = preprocess([[0.5, 0.5], [0.5 + 2.0 ** -12, 0.5]])
    Q = DyadicSquare.containing([0.5, 0.5], -4)
    assert not pair.cz.is_ok(Q)


def test_single_point_keeps_cutoff_squares():
    st = preprocess([[0.3, 0.6]])
    assert np.all(st.cz.K == st.cz.kc)
    assert np.all(st.cz.side == st.config.cutoff)


def test_close_pair_refines_to_body_scale():
    d = 2.0 ** -8
    st = preprocess([[0.5, 0.5], [0.5 + d, 0.5 + 0.3 * d]])
    cz, cfg = st.cz, st.config
    # the gradient across the pair is free, so the bodies keep diameter
    # about 2 and subdivision stops near side 2 / A1
    assert cfg.cutoff / 2 ** 6 <= cz.side.min() <= 2.0 / cfg.A1
    assert cz_violations(st) == (0, 0, 0)
    assert neighbour_ratio(st) <= 4


def test_close_triangle_refines_to_distance_scale():
    d = 2.0 ** -8
    st = preprocess([[0.5, 0.5], [0.5 + d, 0.5], [0.5, 0.5 + d]])
    cz, cfg = st.cz, st.config
    assert st.palps.diameter.max() <= 8 * d
    assert d / (8 * cfg.A1) <= cz.side.min() <= 4 * d / cfg.A1
    assert cz_violations(st) == (0, 0, 0)
    assert neighbour_ratio(st) <= 4


def test_structure(state):
    assert cz_violations(state) == (0, 0, 0)
    assert neighbour_ratio(state) <= 4


def test_cover_exactly_once(state):
    X = np.random.default_rng(1).uniform(-3, 4, (5000, 2))
    assert np.all(containing_counts(state, X) == 1)


def test_lambda_against_brute_force(state):
    cz, cfg = state.cz, state.config
    rng = np.random.default_rng(2)
    X = np.vstack([rng.random((3000, 2)),
                   # dyadic corners
                   np.round(rng.random((200, 2)) * 64) / 64])
    ptr, ids = cz.lambda_ids_many(X)
    half = 0.5 * (1 + cfg.c_G) * cz.side
    for q in range(0, len(X), 3):
        x = X[q]
        inside = np.all((x >= cz.center - half[:, None]) & (x < cz.center + half[:, None]), axis=1)
        want = np.flatnonzero(inside)
        got = ids[ptr[q]:ptr[q + 1]]
        np.testing.assert_array_equal(np.sort(got[got >= 0]), want)
        assert got.size >= 1


def test_lambda_of_outside_materialised_region(state):
    sq = state.cz.lambda_of([40.0, -25.0])
    assert len(sq) >= 1 and all(s.cls == OTHER for s in sq)


def test_classes(state):
    cz, cfg = state.cz, state.config
    E = state.points
    tree = cKDTree(E)
    for s in range(len(cz)):
        c, side = cz.center[s], cz.side[s]
        in5 = points_in_box(tree, E, c, 2.5 * side).size > 0
        inG = points_in_box(tree, E, c, 0.5 * (1 + cfg.c_G) * side).size > 0
        if cz.cls[s] == SHARPSHARP:
            assert inG
        elif cz.cls[s] == SHARP_ONLY:
            assert in5 and not inG
        elif cz.cls[s] == EMPTY_SMALL:
            assert not in5 and side < cfg.cutoff
        else:
            assert not in5 and side >= cfg.cutoff


def test_directions_orientation(state):
    cz = state.cz
    sh = cz.cls >= SHARP_ONLY
    det = cz.u_q_perp[sh, 0] * cz.u_q[sh, 1] - cz.u_q_perp[sh, 1] * cz.u_q[sh, 0]
    np.testing.assert_allclose(det, 1.0, atol=1e-12)
    np.testing.assert_allclose(np.hypot(*cz.u_q[sh].T), 1.0, atol=1e-12)


def test_collinear_data_direction():
    t = np.linspace(0, 1, 40)
    st = preprocess(np.column_stack([t, 0.5 + 0 * t]))
    cz = st.cz
    sh = np.flatnonzero(cz.cls == SHARPSHARP)
    # the free gradient direction is normal to the line
    ang = np.degrees(np.arccos(np.clip(np.abs(cz.u_q[sh, 1]), 0, 1)))
    assert ang.max() <= 3.0


def test_x_sharp_rules(state):
    cz, cfg = state.cz, state.config
    for s in range(len(cz)):
        if cz.cls[s] < SHARP_ONLY or not cz.rep_in5[s]:
            np.testing.assert_array_equal(cz.x_sharp[s], cz.center[s])
        else:
            moved = not np.array_equal(cz.x_sharp[s], cz.center[s])
            if moved:
                d = cz.x_sharp[s] - cz.center[s]
                assert np.all(np.abs(d) <= 0.5 * cz.side[s])
    d, _ = cKDTree(state.points).query(cz.x_sharp)
    assert np.all(d >= cfg.c0 * cz.side)
    assert not np.any(np.all(np.isin(cz.x_sharp, state.points), axis=1))


def test_relay_targets(state):
    cz, cfg = state.cz, state.config
    emp = np.flatnonzero(cz.cls == EMPTY_SMALL)
    assert emp.size
    for s in emp:
        t = cz.mu[s]
        assert cz.cls[t] >= SHARP_ONLY
        half_t = 0.5 * (1 + cfg.c_G) * cz.side[t]
        half_s = 12.5 * cz.side[s]
        gap = np.abs(cz.center[t] - cz.center[s])
        assert np.all(gap < half_t + half_s)


def test_sorted_projections(state):
    cz, cfg = state.cz, state.config
    E = state.points
    tree = cKDTree(E)
    total = 0
    for s in np.flatnonzero(cz.cls == SHARPSHARP):
        idx, t = cz.sorted_projections(s)
        assert np.all(np.diff(t) > 0)
        want = points_in_box(tree, E, cz.center[s], 0.5 * (1 + cfg.c_G) * cz.side[s])
        np.testing.assert_array_equal(np.sort(idx), want)
        np.testing.assert_allclose(t, (E[idx] - E[cz.rep[s]]) @ cz.u_q_perp[s])
        total += idx.size
    assert total <= 200 * state.n


def test_projection_of_rep_alone():
    st = preprocess([[0.5, 0.5]])
    cz = st.cz
    s = np.flatnonzero(cz.cls == SHARPSHARP)[0]
    idx, t = cz.sorted_projections(s)
    assert idx.tolist() == [0] and t.tolist() == [0.0]


def test_graph_slab(state):
    assert sharp_slab_ratio(state) <= 10


def test_counts_linear(state):
    cz = state.cz
    assert np.sum(cz.cls == SHARPSHARP) <= 200 * state.n


def test_records_schema(state):
    rec = next(iter(state.cz.records()))
    assert set(rec) == {"k", "i", "j", "class", "rep", "u_q", "x_sharp"}


def test_dyadic_config_validation():
    with pytest.raises(ValueError):
        Config(A1=33)
