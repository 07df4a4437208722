import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fanstalk import kernels
from fanstalk.intlinalg import rank_mod

needs_numba = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not installed")


def random_case(seed):
    rng = np.random.default_rng(seed)
    n, k = int(rng.integers(2, 5)), int(rng.integers(1, 4))
    q = int(rng.choice([2, 3, 5, 7]))
    E1 = rng.integers(0, 4, (k, n)) * (rng.random((k, n)) < 0.6)
    E2 = rng.integers(0, 4, (k, n)) * (E1 == 0) * (rng.random((k, n)) < 0.6)
    c1 = np.ones(k, np.int64)
    c2 = rng.integers(1, q, k) if q > 2 else np.ones(k, np.int64)
    inv = rng.random(n) < 0.3
    rank_table = [0] + [k] * ((1 << k) - 1)
    return E1, E2, c1, c2, q, inv, rank_table


@needs_numba
@pytest.mark.parametrize("seed", range(25))
def test_backends_agree(seed):
    E1, E2, c1, c2, q, inv, table = random_case(seed)
    a_idx, a_mask = kernels.zero_masks(E1, E2, c1, c2, q, inv, "numba")
    b_idx, b_mask = kernels.zero_masks(E1, E2, c1, c2, q, inv, "numpy")
    assert (a_idx == b_idx).all() and (a_mask == b_mask).all()
    a = kernels.jacobian_violations(E1, E2, c1, c2, q, inv, table, "numba")
    b = kernels.jacobian_violations(E1, E2, c1, c2, q, inv, table, "numpy")
    assert (a == b).all()
    X = np.array([kernels.decode_point(int(i), q, inv.size) for i in a_idx], np.int64)
    if X.size:
        assert (kernels.masks_at(X, E1, E2, c1, c2, q, "numba") == a_mask).all()
        assert (kernels.masks_at(X, E1, E2, c1, c2, q, "numpy") == a_mask).all()
        va = kernels.violations_at(X, E1, E2, c1, c2, q, table, "numba")
        vb = kernels.violations_at(X, E1, E2, c1, c2, q, table, "numpy")
        assert (va == vb).all()
        assert set(a_idx[va].tolist()) == set(a.tolist())


def test_skips_points_with_zero_invertible_coordinate():
    idx, _ = kernels.zero_masks([[1, 0]], [[0, 1]], [1], [4], 5, [True, False], "numpy")
    assert all(kernels.decode_point(int(i), 5, 2)[0] != 0 for i in idx)
    assert idx.size == 20


def test_decode_point():
    assert kernels.decode_point(7, 5, 2) == (2, 1)


@given(st.integers(2, 4), st.integers(1, 4), st.sampled_from([2, 3, 5, 7]), st.integers(0, 10**6))
@settings(max_examples=100, deadline=None)
def test_batched_rank_matches_exact(k, n, q, seed):
    rng = np.random.default_rng(seed)
    J = rng.integers(0, q, (8, k, n))
    got = kernels.batched_rank_mod(J, q)
    for i in range(8):
        assert got[i] == rank_mod(J[i].tolist(), q)


def test_env_flags(monkeypatch):
    monkeypatch.setenv("FANSTALK_DISABLE_NUMBA", "1")
    assert not kernels.numba_enabled()
    assert kernels._resolve(None) == "numpy"
    monkeypatch.setenv("FANSTALK_DISABLE_NUMBA", "0")
    assert kernels.numba_enabled() == kernels.HAVE_NUMBA
    monkeypatch.setenv("FANSTALK_THREADS", "3")
    assert kernels.thread_count() == 3
    monkeypatch.setenv("FANSTALK_THREADS", "0")
    assert kernels.thread_count() == 1


def test_threaded_blocks_agree(monkeypatch):
    E1, E2, c1, c2 = [[2, 1, 0, 0, 0, 0, 0]], [[0, 0, 3, 0, 0, 0, 1]], [1], [6]
    inv = [False] * 7
    monkeypatch.setenv("FANSTALK_THREADS", "1")
    one = kernels.zero_masks(E1, E2, c1, c2, 7, inv)
    monkeypatch.setenv("FANSTALK_THREADS", "4")
    four = kernels.zero_masks(E1, E2, c1, c2, 7, inv)
    assert (one[0] == four[0]).all() and (one[1] == four[1]).all()
