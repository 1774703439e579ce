"""Dense O(n^2) reference implementations used only to check the fast paths."""

import numpy as np


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def dense_hankel(x, geom):
    """Explicit n1 x n2 matrix with H[i, j] = x[i + j]."""
    idx = np.add.outer(np.arange(geom.n1), np.arange(geom.n2))
    return np.asarray(x)[idx]


def dense_lift(a, geom):
    """Explicit matrix of the reweighted lift of a."""
    return dense_hankel(np.asarray(a) / geom.sqrt_weights, geom)


def dense_unlift(M, geom):
    """Adjoint of the lift: antidiagonal sums over sqrt weights."""
    idx = np.add.outer(np.arange(geom.n1), np.arange(geom.n2))
    z = np.zeros(geom.n, dtype=np.complex128)
    np.add.at(z, idx, M)
    return z / geom.sqrt_weights


def dense_loss(L, R, s, f, mask, p, lam, geom):
    """Loss evaluated through explicit matrices, term by term."""
    M = L @ R.conj().T
    z = dense_unlift(M, geom)
    diff = mask.project(z + s - f)
    data = 0.5 / p * np.linalg.norm(diff) ** 2
    penalty = 0.5 * np.linalg.norm(M - dense_lift(z, geom)) ** 2
    balance = 0.25 * lam * np.linalg.norm(L.conj().T @ L - R.conj().T @ R) ** 2
    return data + penalty + balance


def fd_loss_gradient(loss, X, h=1e-6):
    """Central-difference gradient of a real loss over a complex array X.

    Returns G with d loss / d Re(X_ij) = Re(G_ij) and
    d loss / d Im(X_ij) = Im(G_ij).
    """
    G = np.zeros_like(X, dtype=np.complex128)
    it = np.nditer(np.zeros(X.shape), flags=["multi_index"])
    for _ in it:
        ij = it.multi_index
        for direction in (1.0, 1.0j):
            Xp = X.copy()
            Xm = X.copy()
            Xp[ij] += h * direction
            Xm[ij] -= h * direction
            d = (loss(Xp) - loss(Xm)) / (2 * h)
            G[ij] += d * direction
    return G


def principal_angle_sines(A, B):
    """Sines of principal angles between the column spans of A and B."""
    Qa, _ = np.linalg.qr(A)
    Qb, _ = np.linalg.qr(B)
    cos = np.linalg.svd(Qa.conj().T @ Qb, compute_uv=False)
    cos = np.clip(cos, -1.0, 1.0)
    return np.sqrt(1.0 - cos ** 2)
