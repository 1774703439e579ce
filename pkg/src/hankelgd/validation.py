"""Input checking shared by the solver, estimator, and file loaders."""

import numpy as np


def check_signal(values, n=None, allow_missing=False, name="signal"):
    """Coerce to a 1-D complex128 vector, optionally allowing NaN markers."""
    v = np.asarray(values)
    if v.ndim == 2 and 1 in v.shape:
        v = v.ravel()
    if v.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {v.shape}")
    if n is not None and v.shape[0] != n:
        raise ValueError(f"{name} must have length {n}, got {v.shape[0]}")
    if v.shape[0] == 0:
        raise ValueError(f"{name} is empty")
    v = v.astype(np.complex128, copy=False)
    if not allow_missing and not np.isfinite(v).all():
        raise ValueError(f"{name} contains non-finite entries")
    return v


def check_mask_indices(indices, n, name="mask"):
    """Sorted unique 0-based index array, validated against length n."""
    idx = np.asarray(indices)
    if idx.size and not np.issubdtype(idx.dtype, np.integer):
        flt = np.asarray(indices, dtype=float)
        idx = flt.astype(np.intp)
        if np.any(idx != flt):
            raise ValueError(f"{name} indices must be integers")
    idx = np.sort(idx.astype(np.intp).ravel())
    if idx.size == 0:
        raise ValueError(f"{name} is empty")
    if idx[0] < 0 or idx[-1] >= n:
        raise ValueError(f"{name} indices must lie in [0, {n}), got range "
                         f"[{idx[0]}, {idx[-1]}]")
    if np.any(np.diff(idx) == 0):
        dup = int(idx[np.flatnonzero(np.diff(idx) == 0)[0]])
        raise ValueError(f"{name} contains duplicate index {dup}")
    return idx


def check_factor_pair(L, R, geom=None):
    """Validate a factor pair and return complex128 copies-of-view."""
    L = np.asarray(L, dtype=np.complex128)
    R = np.asarray(R, dtype=np.complex128)
    if L.ndim != 2 or R.ndim != 2:
        raise ValueError("factors must be two-dimensional")
    if L.shape[1] != R.shape[1]:
        raise ValueError(f"factor column counts differ: {L.shape} vs {R.shape}")
    if geom is not None and (L.shape[0] != geom.n1 or R.shape[0] != geom.n2):
        raise ValueError(f"factor shapes {L.shape}, {R.shape} do not match {geom}")
    return L, R
