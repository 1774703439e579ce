import numpy as np
import pytest

from hankelgd import make_geometry, model_signal, truncated_svd_hankel
from hankelgd.synth import SpectralModel

from oracles import dense_lift, principal_angle_sines, random_complex


def _check_orthonormal(M, tol=1e-10):
    r = M.shape[1]
    np.testing.assert_allclose(M.conj().T @ M, np.eye(r), atol=tol)


def test_rank_one_all_ones():
    g = make_geometry(3)
    a = g.reweight(np.ones(3, dtype=complex))
    res = truncated_svd_hankel(a, 1, g)
    assert res.converged
    np.testing.assert_allclose(res.sigma, [2.0], rtol=1e-12)
    np.testing.assert_allclose(res.U.ravel(), [np.sqrt(0.5)] * 2, atol=1e-10)
    np.testing.assert_allclose(res.V.ravel(), [np.sqrt(0.5)] * 2, atol=1e-10)


def test_single_exponential_sigma():
    # Unit-modulus exponential: the lift is rank one with sigma = sqrt(n1*n2).
    g = make_geometry(63)
    t = np.arange(1, 64)
    x = np.exp(2j * np.pi * 0.2 * t)
    a = g.reweight(x)
    res = truncated_svd_hankel(a, 1, g)
    assert res.sigma[0] == pytest.approx(np.sqrt(32 * 32), rel=1e-10)
    dense_sigma = np.linalg.svd(dense_lift(a, g), compute_uv=False)
    assert res.sigma[0] == pytest.approx(dense_sigma[0], rel=1e-10)
    assert dense_sigma[1] <= 1e-10 * dense_sigma[0]


def test_three_exponentials_match_dense():
    g = make_geometry(125)
    model = SpectralModel(
        frequencies=np.array([0.1, 0.33, 0.71]),
        amplitudes=np.array([1.0 + 0.2j, -0.8, 0.5j]),
        n=125,
    )
    a = g.reweight(model_signal(model))
    res = truncated_svd_hankel(a, 3, g)
    assert res.converged
    G = dense_lift(a, g)
    U_d, s_d, Vh_d = np.linalg.svd(G)
    np.testing.assert_allclose(res.sigma, s_d[:3], rtol=1e-8)
    assert principal_angle_sines(res.U, U_d[:, :3]).max() <= 1e-6
    assert principal_angle_sines(res.V, Vh_d.conj().T[:, :3]).max() <= 1e-6
    _check_orthonormal(res.U)
    _check_orthonormal(res.V)
    assert np.all(np.diff(res.sigma) <= 1e-12)


@pytest.mark.parametrize("n,r", [(24, 2), (63, 4), (100, 6)])
def test_random_dense_match(n, r):
    rng = np.random.default_rng(n + r)
    g = make_geometry(n)
    a = random_complex(rng, n)
    res = truncated_svd_hankel(a, r, g, rng=np.random.default_rng(5))
    s_d = np.linalg.svd(dense_lift(a, g), compute_uv=False)
    np.testing.assert_allclose(res.sigma, s_d[:r], rtol=1e-8)
    _check_orthonormal(res.U)
    _check_orthonormal(res.V)


def test_rank_deficient_request():
    # Requesting more triplets than the operator rank pads with zeros.
    g = make_geometry(41)
    t = np.arange(1, 42)
    a = g.reweight(np.exp(2j * np.pi * 0.13 * t))
    res = truncated_svd_hankel(a, 3, g)
    assert res.converged
    assert res.sigma[0] > 1.0
    assert res.sigma[1] <= 1e-10 * res.sigma[0]
    assert res.sigma[2] <= 1e-10 * res.sigma[0]
    _check_orthonormal(res.U)
    _check_orthonormal(res.V)


def test_phase_convention():
    g = make_geometry(63)
    rng = np.random.default_rng(3)
    a = random_complex(rng, 63)
    res = truncated_svd_hankel(a, 2, g)
    for j in range(2):
        piv = res.U[np.argmax(np.abs(res.U[:, j])), j]
        assert abs(piv.imag) <= 1e-10 * abs(piv)
        assert piv.real > 0


def test_deterministic_without_seed():
    g = make_geometry(80)
    rng = np.random.default_rng(9)
    a = random_complex(rng, 80)
    r1 = truncated_svd_hankel(a, 3, g)
    r2 = truncated_svd_hankel(a, 3, g)
    np.testing.assert_array_equal(r1.sigma, r2.sigma)
    np.testing.assert_array_equal(r1.U, r2.U)
    np.testing.assert_array_equal(r1.V, r2.V)


def test_reconstruction_error_certifies_triplets():
    g = make_geometry(99)
    rng = np.random.default_rng(12)
    a = random_complex(rng, 99)
    res = truncated_svd_hankel(a, 4, g)
    G = dense_lift(a, g)
    # Residual of each triplet: ||G v - sigma u|| small relative to sigma_1.
    resid = G @ res.V - res.U * res.sigma
    assert np.linalg.norm(resid, axis=0).max() <= 1e-7 * res.sigma[0]


def test_rank_bounds():
    g = make_geometry(9)
    a = np.ones(9, dtype=complex)
    with pytest.raises(ValueError):
        truncated_svd_hankel(a, 6, g)  # min(n1, n2) = 5
    with pytest.raises(ValueError):
        truncated_svd_hankel(a, 0, g)


def test_zero_vector():
    g = make_geometry(12)
    res = truncated_svd_hankel(np.zeros(12, dtype=complex), 2, g)
    np.testing.assert_array_equal(res.sigma, [0.0, 0.0])
    _check_orthonormal(res.U)
    _check_orthonormal(res.V)


def test_degenerate_geometries():
    g1 = make_geometry(1)
    res = truncated_svd_hankel(np.array([3.0 + 4.0j]), 1, g1)
    assert res.sigma[0] == pytest.approx(5.0, rel=1e-12)
    g2 = make_geometry(2)
    a = np.array([1.0 + 0j, 2.0])
    res = truncated_svd_hankel(a, 1, g2)
    assert res.sigma[0] == pytest.approx(np.sqrt(5.0), rel=1e-12)
    assert res.converged


def test_step_cap_flags_unconverged():
    g = make_geometry(200)
    rng = np.random.default_rng(0)
    a = random_complex(rng, 200)
    res = truncated_svd_hankel(a, 3, g, max_steps=4)
    assert not res.converged
    assert res.sigma.shape == (3,)
    _check_orthonormal(res.U)
