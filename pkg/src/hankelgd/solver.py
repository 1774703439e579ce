"""Robust completion of low-rank Hankel matrices by factored gradient descent.

The iterate is a factor pair (L, R) representing the n1 x n2 candidate matrix
L @ R*, tracked only through its reweighted vector z = antidiagonal sums of
L @ R* over sqrt(weights), plus a sparse outlier estimate s supported on the
observed entries. One iteration alternates a hard-truncation outlier update
with a projected gradient step on both factors, at O(r n log n + r^2 n) cost.
"""

import time
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .fastops import HankelOperator, gstar_lowrank, sparsify
from .geometry import make_geometry
from .svd import truncated_svd_hankel
from .validation import check_mask_indices, check_signal

_SVD_SEED = 0x5EEDED


class DivergenceError(RuntimeError):
    """Raised when an iterate stops being finite (step size too large)."""


def _count(x):
    # alpha * p * n is an exact integer in exact arithmetic whenever p = m/n;
    # the epsilon keeps floor() from dropping a slot to float representation.
    return int(np.floor(x + 1e-9))


@dataclass
class SolverConfig:
    """Hyperparameters of the completion solver.

    ``p`` defaults to the observed fraction m/n when left as None; override it
    for Bernoulli-sampled masks with a known rate. The truncation fraction at
    iteration k is gamma(k) * alpha * p, with gamma decaying geometrically
    from ``gamma_start`` to ``gamma_floor`` (a callable ``gamma_schedule``
    takes precedence). The gradient step size is eta_scale / sigma_1 of the
    spectral initialization.
    """

    rank: int
    alpha: float = 0.0
    p: float = None
    lam: float = 1.0 / 16.0
    eta_scale: float = 0.5
    gamma_start: float = 1.5
    gamma_floor: float = 1.05
    gamma_decay: float = 0.95
    gamma_schedule: object = None  # optional callable k -> gamma_k
    max_iters: int = 1000
    rel_tol: float = 1e-5
    mu: float = 1.0
    project: bool = True
    seed: int = None

    _JSON_FIELDS = (
        "rank", "alpha", "p", "lam", "eta_scale", "gamma_start", "gamma_floor",
        "gamma_decay", "max_iters", "rel_tol", "mu", "project", "seed",
    )

    def gamma(self, k):
        if self.gamma_schedule is not None:
            g = float(self.gamma_schedule(k))
        else:
            g = self.gamma_floor + (self.gamma_start - self.gamma_floor) * self.gamma_decay ** k
        if not 1.0 < g <= 2.0:
            raise ValueError(f"gamma_{k} = {g} outside (1, 2]")
        return g

    def validate(self):
        if self.rank < 1:
            raise ValueError(f"rank must be positive, got {self.rank}")
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must be in [0, 1), got {self.alpha}")
        if self.p is not None and not 0.0 < self.p <= 1.0:
            raise ValueError(f"p must be in (0, 1], got {self.p}")
        if self.eta_scale <= 0:
            raise ValueError(f"eta_scale must be positive, got {self.eta_scale}")
        if self.lam < 0:
            raise ValueError(f"lam must be non-negative, got {self.lam}")
        if self.mu <= 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.max_iters < 0:
            raise ValueError(f"max_iters must be non-negative, got {self.max_iters}")
        if self.rel_tol <= 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.gamma_schedule is None:
            if not (1.0 < self.gamma_floor <= self.gamma_start <= 2.0):
                raise ValueError(
                    f"need 1 < gamma_floor <= gamma_start <= 2, got "
                    f"{self.gamma_floor}, {self.gamma_start}"
                )
            if not 0.0 < self.gamma_decay <= 1.0:
                raise ValueError(f"gamma_decay must be in (0, 1], got {self.gamma_decay}")
        return self

    def to_dict(self):
        return {k: getattr(self, k) for k in self._JSON_FIELDS}

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - set(cls._JSON_FIELDS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "rank" not in data:
            raise ValueError("config requires 'rank'")
        return cls(**data)


class ObservationMask:
    """Sorted set of observed positions in a length-n signal."""

    def __init__(self, indices, n):
        self.n = int(n)
        self.indices = check_mask_indices(indices, self.n)
        self.observed = np.zeros(self.n, dtype=bool)
        self.observed[self.indices] = True

    @property
    def m(self):
        return int(self.indices.shape[0])

    @property
    def p_hat(self):
        return self.m / self.n

    def project(self, v):
        """Zero every entry off the mask."""
        out = np.zeros_like(np.asarray(v))
        out[self.indices] = v[self.indices]
        return out

    @classmethod
    def full(cls, n):
        return cls(np.arange(n), n)

    @classmethod
    def from_missing(cls, values):
        """Mask of the finite entries of a NaN-marked signal."""
        values = np.asarray(values)
        return cls(np.flatnonzero(np.isfinite(values)), values.shape[0])

    def __repr__(self):
        return f"ObservationMask(m={self.m}, n={self.n})"


@dataclass
class SolverState:
    """One iterate: factors, outliers, the cached z vector, and bookkeeping."""

    geom: object
    L: np.ndarray
    R: np.ndarray
    s: np.ndarray
    z: np.ndarray
    k: int
    residual_trace: list
    p: float
    eta: float
    sigma0: float
    row_bound_L: float
    row_bound_R: float
    f_norm: float
    init_svd_converged: bool = True


@dataclass
class RecoveryResult:
    """Solver output in reweighted (z_hat) and natural (x_hat) domains."""

    z_hat: np.ndarray
    x_hat: np.ndarray
    s_hat: np.ndarray
    iterations: int
    converged: bool
    residual_trace: np.ndarray
    wall_time_seconds: float
    init_svd_converged: bool = True


def project_rows(M, bound):
    """Euclidean projection onto {rows with squared norm <= bound}.

    Rows over the bound are scaled back to it; rows at or under it pass
    through unchanged. Always returns a fresh array.
    """
    if bound < 0:
        raise ValueError(f"bound must be non-negative, got {bound}")
    out = np.array(M, copy=True)
    if not np.isfinite(bound):
        return out
    sq = np.einsum("ij,ij->i", out.conj(), out).real
    over = sq > bound
    if np.any(over):
        out[over] *= np.sqrt(bound / sq[over])[:, None]
    return out


def _masked_residual(z, s, f, mask):
    idx = mask.indices
    return np.linalg.norm(z[idx] + s[idx] - f[idx])


def initialize(f_obs, mask, cfg, geom):
    """Spectral initialization with upfront trimming of large outliers.

    Truncates the floor(alpha*p*n) largest observations (compared in the
    unweighted domain) into s0, takes the rank-r truncated SVD of the lift of
    (observations - s0)/p, splits it into balanced factors, and clips factor
    rows to the incoherence bound frozen from the initial spectral norms.
    """
    cfg.validate()
    f_obs = check_signal(f_obs, n=geom.n, allow_missing=True, name="observations")
    if mask.n != geom.n:
        raise ValueError(f"mask length {mask.n} does not match geometry {geom}")
    if cfg.rank > min(geom.n1, geom.n2):
        raise ValueError(
            f"rank {cfg.rank} exceeds min(n1, n2) = {min(geom.n1, geom.n2)}"
        )
    f = mask.project(f_obs)
    if not np.isfinite(f[mask.indices]).all():
        raise ValueError("observed entries contain non-finite values")
    f_norm = np.linalg.norm(f[mask.indices])
    if f_norm == 0:
        raise ValueError("observed signal is identically zero")
    p = mask.p_hat if cfg.p is None else cfg.p
    n_out = _count(cfg.alpha * p * geom.n)
    if n_out > mask.m:
        raise ValueError(
            f"alpha*p*n = {cfg.alpha * p * geom.n:.3f} exceeds the {mask.m} "
            "observed entries; check alpha and p"
        )

    s0 = geom.reweight(sparsify(geom.unweight(f), n_out))
    rng = np.random.default_rng(_SVD_SEED if cfg.seed is None else cfg.seed)
    svd0 = truncated_svd_hankel((f - s0) / p, cfg.rank, geom, rng=rng)
    if not svd0.converged:
        warnings.warn(
            "spectral initialization SVD hit its step cap; continuing with "
            "the best available estimate",
            RuntimeWarning,
        )
    sigma1 = float(svd0.sigma[0])
    if sigma1 <= 0:
        raise ValueError("initialization found no signal in the observations")
    root = np.sqrt(svd0.sigma)
    L0 = svd0.U * root
    R0 = svd0.V * root
    # Spectral norms of the unprojected factors are sqrt(sigma1) exactly.
    if cfg.project:
        bound = 2.0 * cfg.mu * cfg.rank * geom.aspect_constant * sigma1 / geom.n
        L0 = project_rows(L0, bound)
        R0 = project_rows(R0, bound)
    else:
        bound = np.inf
    z0 = gstar_lowrank(L0, R0, geom)
    res0 = _masked_residual(z0, s0, f, mask) / f_norm
    return SolverState(
        geom=geom,
        L=L0,
        R=R0,
        s=s0,
        z=z0,
        k=0,
        residual_trace=[float(res0)],
        p=p,
        eta=cfg.eta_scale / sigma1,
        sigma0=sigma1,
        row_bound_L=bound,
        row_bound_R=bound,
        f_norm=float(f_norm),
        init_svd_converged=svd0.converged,
    )


def update_outliers(state, f_obs, mask, cfg):
    """Hard-truncated residue: keep the floor(gamma_k*alpha*p*n) largest."""
    count = _count(cfg.gamma(state.k) * cfg.alpha * state.p * state.geom.n)
    residue = np.zeros_like(state.z)
    idx = mask.indices
    residue[idx] = f_obs[idx] - state.z[idx]
    return sparsify(residue, count)


def _gradient_arrays(L, R, z, s, f, mask, p, lam, geom):
    a = -z.astype(np.complex128, copy=True)
    idx = mask.indices
    a[idx] += (z[idx] + s[idx] - f[idx]) / p
    op = HankelOperator.from_reweighted(a, geom)
    LtL = L.conj().T @ L
    RtR = R.conj().T @ R
    GL = op.matmat(R) + L @ (lam * LtL + (1.0 - lam) * RtR)
    GR = op.rmatmat(L) + R @ (lam * RtR + (1.0 - lam) * LtL)
    return GL, GR


def gradient(state, f_obs, mask, cfg):
    """Loss gradients with respect to the conjugate factor coordinates.

    Uses the cached state.z and state.s. The data-plus-penalty part costs
    2r + 2 FFTs; the balance part costs O(r^2 n). A step L -= eta * GL,
    R -= eta * GR decreases the loss to first order.
    """
    return _gradient_arrays(
        state.L, state.R, state.z, state.s, f_obs, mask, state.p, cfg.lam, state.geom
    )


def evaluate_loss(L, R, s, f_obs, mask, cfg, geom):
    """Data misfit + Hankel-feasibility penalty + factor balance penalty.

    The penalty term ||(I - G G*)(L R*)||_F^2 is evaluated as
    ||L R*||_F^2 - ||z||_2^2 (the lift projector is orthogonal), so nothing
    larger than r x r Gram matrices is ever formed.
    """
    p = mask.p_hat if cfg.p is None else cfg.p
    z = gstar_lowrank(L, R, geom)
    idx = mask.indices
    data = 0.5 / p * np.linalg.norm(z[idx] + s[idx] - f_obs[idx]) ** 2
    LtL = L.conj().T @ L
    RtR = R.conj().T @ R
    product_sq = np.einsum("ij,ji->", LtL, RtR).real
    penalty = 0.5 * (product_sq - np.vdot(z, z).real)
    balance = 0.25 * cfg.lam * np.linalg.norm(LtL - RtR) ** 2
    return float(data + penalty + balance)


def step(state, f_obs, mask, cfg):
    """One outlier update plus one projected gradient step on both factors.

    Returns a new state; the input state is left untouched. Raises
    :class:`DivergenceError` if the new iterate stops being finite.
    """
    geom = state.geom
    s_new = update_outliers(state, f_obs, mask, cfg)
    GL, GR = _gradient_arrays(
        state.L, state.R, state.z, s_new, f_obs, mask, state.p, cfg.lam, geom
    )
    L_new = state.L - state.eta * GL
    R_new = state.R - state.eta * GR
    if cfg.project:
        L_new = project_rows(L_new, state.row_bound_L)
        R_new = project_rows(R_new, state.row_bound_R)
    z_new = gstar_lowrank(L_new, R_new, geom)
    finite = (
        np.isfinite(L_new).all()
        and np.isfinite(R_new).all()
        and np.isfinite(z_new).all()
    )
    if not finite:
        raise DivergenceError(
            f"non-finite iterate at iteration {state.k + 1}; "
            f"step size eta = {state.eta:.3e} is too large"
        )
    res = _masked_residual(z_new, s_new, f_obs, mask) / state.f_norm
    if cfg.project:
        row_sq = np.einsum("ij,ij->i", L_new.conj(), L_new).real
        assert row_sq.max() <= state.row_bound_L * (1 + 1e-9)
        row_sq = np.einsum("ij,ij->i", R_new.conj(), R_new).real
        assert row_sq.max() <= state.row_bound_R * (1 + 1e-9)
    return replace(
        state,
        L=L_new,
        R=R_new,
        s=s_new,
        z=z_new,
        k=state.k + 1,
        residual_trace=state.residual_trace + [float(res)],
    )


def run(f_obs, mask, cfg, geom=None, callback=None):
    """Full solve: initialize, iterate to the residual tolerance, package.

    Stops when ||masked(z + s - f)|| / ||masked f|| <= cfg.rel_tol (the
    vector residual equals the matrix-form residual by the lift isometry) or
    after cfg.max_iters iterations. If an iterate diverges, the step size is
    halved (up to five times) and the loop restarts from the initialization.

    ``callback(state)`` runs after initialization and after every iteration.
    """
    t0 = time.perf_counter()
    if geom is None:
        geom = make_geometry(len(f_obs))
    state0 = initialize(f_obs, mask, cfg, geom)
    f = mask.project(np.asarray(f_obs, dtype=np.complex128))

    halvings = 0
    while True:
        state = replace(state0, eta=state0.eta * 0.5 ** halvings,
                        residual_trace=list(state0.residual_trace))
        try:
            if callback is not None:
                callback(state)
            while state.k < cfg.max_iters and state.residual_trace[-1] > cfg.rel_tol:
                state = step(state, f, mask, cfg)
                if callback is not None:
                    callback(state)
            break
        except DivergenceError:
            halvings += 1
            if halvings > 5:
                raise

    converged = state.residual_trace[-1] <= cfg.rel_tol
    return RecoveryResult(
        z_hat=state.z,
        x_hat=geom.unweight(state.z),
        s_hat=state.s,
        iterations=state.k,
        converged=bool(converged),
        residual_trace=np.asarray(state.residual_trace),
        wall_time_seconds=time.perf_counter() - t0,
        init_svd_converged=state.init_svd_converged,
    )
