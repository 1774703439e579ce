"""FFT kernels for products with Hankel matrices that are never formed.

Every routine here works on the length-n vector of antidiagonal values and
costs O(r n log n) via zero-padded fast convolutions, where the dense
equivalent would be O(r n^2). Dense construction is reserved for test
oracles.
"""

import numpy as np
from scipy.fft import fft, ifft

from .validation import check_factor_pair


class HankelOperator:
    """The n1 x n2 matrix M[i, j] = x[i + j], applied through convolutions.

    The spectrum of ``x`` is cached at construction, so each matvec costs one
    forward and one inverse FFT. For the reweighted lift of a vector ``a``
    (entries a[t] / sqrt(weights[t])) use :meth:`from_reweighted`.
    """

    def __init__(self, x, geom):
        self.geom = geom
        self.shape = (geom.n1, geom.n2)
        x = np.ascontiguousarray(geom.check_length(x, "antidiagonal values"),
                                 dtype=np.complex128)
        self._fx = fft(x, geom.nfft)
        self._fx_conj = fft(np.conj(x), geom.nfft)

    @classmethod
    def from_reweighted(cls, a, geom):
        """Operator for the isometric lift of a reweighted vector ``a``."""
        return cls(geom.unweight(a), geom)

    def matvec(self, v):
        """Product with a length-n2 vector."""
        g = self.geom
        fv = fft(np.ascontiguousarray(v[::-1]), g.nfft)
        out = ifft(self._fx * fv)
        return out[g.n2 - 1 : g.n2 - 1 + g.n1]

    def rmatvec(self, u):
        """Conjugate-transposed product with a length-n1 vector."""
        g = self.geom
        fu = fft(np.ascontiguousarray(u[::-1]), g.nfft)
        out = ifft(self._fx_conj * fu)
        return out[g.n1 - 1 : g.n1 - 1 + g.n2]

    def matmat(self, V):
        """Product with an n2 x r block, one convolution per column."""
        g = self.geom
        if V.shape[0] != g.n2:
            raise ValueError(f"expected {g.n2} rows, got {V.shape}")
        fv = fft(np.ascontiguousarray(V[::-1]), g.nfft, axis=0)
        out = ifft(self._fx[:, None] * fv, axis=0)
        return out[g.n2 - 1 : g.n2 - 1 + g.n1]

    def rmatmat(self, U):
        """Conjugate-transposed product with an n1 x r block."""
        g = self.geom
        if U.shape[0] != g.n1:
            raise ValueError(f"expected {g.n1} rows, got {U.shape}")
        fu = fft(np.ascontiguousarray(U[::-1]), g.nfft, axis=0)
        out = ifft(self._fx_conj[:, None] * fu, axis=0)
        return out[g.n1 - 1 : g.n1 - 1 + g.n2]


def gstar_lowrank(L, R, geom):
    """Reweighted antidiagonal sums of L @ R* without forming the product.

    Entry t is the t-th antidiagonal sum of the n1 x n2 matrix L @ R*, divided
    by sqrt(weights[t]). Computed as r fast convolutions of the factor
    columns, summed in the frequency domain.
    """
    L, R = check_factor_pair(L, R, geom)
    fl = fft(np.ascontiguousarray(L, dtype=np.complex128), geom.nfft, axis=0)
    fr = fft(np.conj(R), geom.nfft, axis=0)
    acc = np.einsum("tj,tj->t", fl, fr)
    return ifft(acc)[: geom.n] / geom.sqrt_weights


def g_apply_right(a, R, geom):
    """G(a) @ R where G(a) is the Hankel lift of the reweighted vector a."""
    return HankelOperator.from_reweighted(a, geom).matmat(R)


def g_apply_left(a, L, geom):
    """G(a)* @ L, the conjugate-transposed mate of :func:`g_apply_right`."""
    return HankelOperator.from_reweighted(a, geom).rmatmat(L)


def sparsify(v, k):
    """Zero all but the k largest-magnitude entries of v.

    Ties at the cutoff magnitude keep the lowest indices, so the result is
    deterministic. k <= 0 returns the zero vector, k >= len(v) a copy of v.
    """
    v = np.asarray(v)
    k = int(k)
    if k <= 0:
        return np.zeros_like(v)
    if k >= v.shape[0]:
        return v.copy()
    order = np.argsort(-np.abs(v), kind="stable")
    out = np.zeros_like(v)
    keep = order[:k]
    out[keep] = v[keep]
    return out
