"""Error measures for factored and vector-form recoveries."""

from dataclasses import dataclass

import numpy as np

SUCCESS_THRESHOLD = 1e-3


@dataclass
class DistanceReport:
    """Factor distance after absorbing the shared unitary ambiguity."""

    d: float
    Q: np.ndarray
    rel_frobenius: float
    aligner_unique: bool = True


def aligned_distance(L, R, L_ref, R_ref):
    """Distance between factor pairs minimized over a shared r x r unitary.

    The optimal aligner has the closed form Q = Ua @ Va* where Ua, Va come
    from the SVD of L_ref* L + R_ref* R. Factorizations are only defined up
    to this rotation, so the aligned distance is the meaningful one. A
    rank-deficient cross-Gram still yields a valid minimizer but a non-unique
    one; the report flags that case.
    """
    if L.shape != L_ref.shape or R.shape != R_ref.shape:
        raise ValueError(
            f"factor shapes {L.shape}/{R.shape} do not match references "
            f"{L_ref.shape}/{R_ref.shape}"
        )
    A = L_ref.conj().T @ L + R_ref.conj().T @ R
    Ua, sa, Vah = np.linalg.svd(A)
    Q = Ua @ Vah
    unique = bool(sa.shape[0] == 0 or sa[-1] > 1e-12 * max(sa[0], 1e-300))
    d = np.sqrt(
        np.linalg.norm(L - L_ref @ Q) ** 2 + np.linalg.norm(R - R_ref @ Q) ** 2
    )
    return DistanceReport(
        d=float(d),
        Q=Q,
        rel_frobenius=_product_rel_frobenius(L, R, L_ref, R_ref),
        aligner_unique=unique,
    )


def _product_rel_frobenius(L, R, L_ref, R_ref):
    # ||L R* - L_ref R_ref*||_F / ||L_ref R_ref*||_F through r x r Grams only.
    cross = np.einsum(
        "ij,ji->", L.conj().T @ L_ref, R_ref.conj().T @ R
    ).real
    own = np.einsum("ij,ji->", L.conj().T @ L, R.conj().T @ R).real
    ref = np.einsum(
        "ij,ji->", L_ref.conj().T @ L_ref, R_ref.conj().T @ R_ref
    ).real
    num_sq = max(own + ref - 2.0 * cross, 0.0)
    if ref <= 0:
        return 0.0 if num_sq == 0 else np.inf
    return float(np.sqrt(num_sq / ref))


def relative_error(z_hat, z_ref):
    """||z_hat - z_ref|| / ||z_ref||; equals the matrix Frobenius ratio."""
    z_hat = np.asarray(z_hat)
    z_ref = np.asarray(z_ref)
    if z_hat.shape != z_ref.shape:
        raise ValueError(f"shape mismatch: {z_hat.shape} vs {z_ref.shape}")
    ref_norm = np.linalg.norm(z_ref)
    if ref_norm == 0:
        raise ValueError("reference signal is zero")
    return float(np.linalg.norm(z_hat - z_ref) / ref_norm)


def classify_success(rel_err, threshold=SUCCESS_THRESHOLD):
    """True when the relative recovery error is at or under the threshold."""
    return bool(rel_err <= threshold)
