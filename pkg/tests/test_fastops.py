import numpy as np
import pytest

from hankelgd import (
    HankelOperator,
    g_apply_left,
    g_apply_right,
    gstar_lowrank,
    make_geometry,
    sparsify,
)

from oracles import dense_lift, dense_unlift, random_complex


def test_gstar_single_nonzero_antidiagonal():
    g = make_geometry(3)
    L = np.array([[1.0], [0.0]], dtype=complex)
    R = np.array([[1.0], [0.0]], dtype=complex)
    np.testing.assert_allclose(gstar_lowrank(L, R, g), [1, 0, 0], atol=1e-14)


def test_gstar_all_ones_product():
    g = make_geometry(3)
    L = np.ones((2, 1), dtype=complex)
    R = np.ones((2, 1), dtype=complex)
    np.testing.assert_allclose(
        gstar_lowrank(L, R, g), [1.0, np.sqrt(2.0), 1.0], atol=1e-14
    )


@pytest.mark.parametrize("n", [16, 63, 64, 128])
@pytest.mark.parametrize("r", [1, 3, 5])
def test_gstar_matches_dense(n, r):
    rng = np.random.default_rng(n * 37 + r)
    g = make_geometry(n)
    L = random_complex(rng, g.n1, r)
    R = random_complex(rng, g.n2, r)
    fast = gstar_lowrank(L, R, g)
    dense = dense_unlift(L @ R.conj().T, g)
    np.testing.assert_allclose(fast, dense, rtol=1e-10, atol=1e-10)


def test_g_apply_right_single_entry():
    g = make_geometry(5)
    a = np.zeros(5, dtype=complex)
    a[0] = g.sqrt_weights[0]  # lift has a single 1 at the top-left corner
    rng = np.random.default_rng(1)
    R = random_complex(rng, g.n2, 2)
    M = g_apply_right(a, R, g)
    np.testing.assert_allclose(M[0], R[0], atol=1e-14)
    np.testing.assert_allclose(M[1:], 0, atol=1e-14)


def test_g_apply_right_all_ones():
    g = make_geometry(7)
    a = g.reweight(np.ones(7))  # unweighted antidiagonal values all one
    R = np.zeros((g.n2, 1), dtype=complex)
    R[0, 0] = 1.0
    M = g_apply_right(a, R, g)
    np.testing.assert_allclose(M[:, 0], np.ones(g.n1), atol=1e-13)


@pytest.mark.parametrize("n", [16, 63, 64, 128])
@pytest.mark.parametrize("r", [1, 3, 5])
def test_g_apply_matches_dense(n, r):
    rng = np.random.default_rng(n * 101 + r)
    g = make_geometry(n)
    a = random_complex(rng, n)
    R = random_complex(rng, g.n2, r)
    L = random_complex(rng, g.n1, r)
    G = dense_lift(a, g)
    np.testing.assert_allclose(g_apply_right(a, R, g), G @ R, rtol=1e-10, atol=1e-10)
    np.testing.assert_allclose(
        g_apply_left(a, L, g), G.conj().T @ L, rtol=1e-10, atol=1e-10
    )


def test_adjoint_pairing():
    rng = np.random.default_rng(7)
    for n in (16, 63, 128):
        g = make_geometry(n)
        a = random_complex(rng, n)
        v = random_complex(rng, g.n2)
        u = random_complex(rng, g.n1)
        op = HankelOperator.from_reweighted(a, g)
        lhs = np.vdot(u, op.matvec(v))
        rhs = np.vdot(op.rmatvec(u), v)
        assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), 1.0)


def test_matvec_agrees_with_matmat():
    rng = np.random.default_rng(11)
    g = make_geometry(40)
    op = HankelOperator.from_reweighted(random_complex(rng, 40), g)
    v = random_complex(rng, g.n2)
    u = random_complex(rng, g.n1)
    np.testing.assert_allclose(op.matvec(v), op.matmat(v[:, None])[:, 0], rtol=1e-12)
    np.testing.assert_allclose(op.rmatvec(u), op.rmatmat(u[:, None])[:, 0], rtol=1e-12)


@pytest.mark.parametrize("n", [16, 64, 125, 256])
def test_lift_isometry(n):
    # Reconstructing z from its dense lift is the identity (adjoint inverts).
    rng = np.random.default_rng(n)
    g = make_geometry(n)
    z = random_complex(rng, n)
    np.testing.assert_allclose(
        dense_unlift(dense_lift(z, g), g), z, rtol=1e-12, atol=1e-12
    )


@pytest.mark.parametrize("n", [8, 63, 128])
def test_lift_norm_identity(n):
    rng = np.random.default_rng(n + 1)
    g = make_geometry(n)
    z = random_complex(rng, n)
    assert np.linalg.norm(dense_lift(z, g)) == pytest.approx(
        np.linalg.norm(z), rel=1e-12
    )


def test_sparsify_examples():
    np.testing.assert_array_equal(
        sparsify(np.array([3.0, -1.0, 0.5]), 1), [3.0, 0.0, 0.0]
    )
    v = np.array([1 + 0j, 0, 2j, -3])
    np.testing.assert_array_equal(sparsify(v, 2), [0, 0, 2j, -3])
    np.testing.assert_array_equal(sparsify(np.ones(3), 2), [1.0, 1.0, 0.0])


def test_sparsify_edges():
    v = np.array([1.0, -2.0, 3.0])
    np.testing.assert_array_equal(sparsify(v, 0), np.zeros(3))
    np.testing.assert_array_equal(sparsify(v, 3), v)
    np.testing.assert_array_equal(sparsify(v, 10), v)
    out = sparsify(v, 10)
    out[0] = 99.0  # copies, never aliases
    assert v[0] == 1.0


@pytest.mark.parametrize("seed", range(20))
def test_sparsify_support_matches_sort_oracle(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 200))
    k = int(rng.integers(0, n + 1))
    v = random_complex(rng, n)
    out = sparsify(v, k)
    assert np.count_nonzero(out) <= k
    expected = np.sort(np.argsort(-np.abs(v), kind="stable")[:k])
    np.testing.assert_array_equal(np.sort(np.flatnonzero(out != 0)),
                                  expected[np.abs(v[expected]) > 0])
    np.testing.assert_array_equal(out[out != 0], v[out != 0])


def test_shape_errors():
    g = make_geometry(6)
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        gstar_lowrank(random_complex(rng, 4, 2), random_complex(rng, g.n2, 2), g)
    with pytest.raises(ValueError):
        g_apply_right(random_complex(rng, 6), random_complex(rng, g.n2 + 1, 2), g)
