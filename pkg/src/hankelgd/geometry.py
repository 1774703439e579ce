"""Hankel shape bookkeeping and antidiagonal reweighting."""

import numpy as np
from scipy.fft import next_fast_len


class HankelGeometry:
    """Shape data for the n1 x n2 Hankel lift of a length-n vector.

    An n1 x n2 Hankel matrix is constant along antidiagonals, so it is fully
    determined by n = n1 + n2 - 1 values. ``weights[t]`` counts the matrix
    cells on antidiagonal t; scaling entry t by sqrt(weights[t]) makes the
    vector 2-norm agree with the Frobenius norm of the lifted matrix.

    Instances are immutable after construction and safe to share across
    threads; the cached square roots and FFT length exist so per-iteration
    kernels never recompute them.
    """

    def __init__(self, n1, n2):
        n1, n2 = int(n1), int(n2)
        if n1 < 1 or n2 < 1:
            raise ValueError(f"matrix sides must be positive, got {n1}x{n2}")
        self.n1 = n1
        self.n2 = n2
        self.n = n1 + n2 - 1
        i = np.arange(1, self.n + 1)
        self.weights = np.minimum(np.minimum(i, self.n - i + 1), min(n1, n2))
        self.sqrt_weights = np.sqrt(self.weights.astype(np.float64))
        self.nfft = next_fast_len(self.n)

    @property
    def aspect_constant(self):
        """max(n/n1, n/n2); about 2 for near-square shapes."""
        return self.n / min(self.n1, self.n2)

    def check_length(self, v, name="vector"):
        v = np.asarray(v)
        if v.ndim != 1 or v.shape[0] != self.n:
            raise ValueError(f"{name} must have shape ({self.n},), got {v.shape}")
        return v

    def reweight(self, x):
        """Multiply entry t by sqrt(weights[t])."""
        return self.check_length(x) * self.sqrt_weights

    def unweight(self, z):
        """Divide entry t by sqrt(weights[t]); inverse of :meth:`reweight`."""
        return self.check_length(z) / self.sqrt_weights

    def __repr__(self):
        return f"HankelGeometry(n1={self.n1}, n2={self.n2})"

    def __eq__(self, other):
        return (
            isinstance(other, HankelGeometry)
            and self.n1 == other.n1
            and self.n2 == other.n2
        )


def make_geometry(n):
    """Near-square geometry for a length-n signal.

    Odd n gives n1 = n2 = (n+1)/2; even n gives n1 = n/2 and n2 = n/2 + 1.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"signal length must be positive, got {n}")
    if n % 2:
        n1 = (n + 1) // 2
        return HankelGeometry(n1, n1)
    return HankelGeometry(n // 2, n // 2 + 1)
