"""Scikit-learn style front end for the completion solver."""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .geometry import make_geometry
from .solver import ObservationMask, SolverConfig, run
from .validation import check_signal


class HankelCompleter(BaseEstimator):
    """Complete a spectrally sparse complex signal from corrupted samples.

    The input to :meth:`fit` is a one-dimensional complex signal in natural
    units; unobserved entries are NaN (or listed through ``mask``). Fitting
    runs the factored gradient descent solver and exposes the completed
    signal, the estimated additive outliers, and convergence diagnostics.

    Parameters mirror :class:`~hankelgd.solver.SolverConfig`; see there for
    semantics. Hyperparameters are stored untouched, so the estimator clones
    and grid-searches like any other scikit-learn estimator.

    Attributes
    ----------
    signal_ : completed signal, natural domain
    outliers_ : estimated additive corruption, natural domain
    n_iter_, converged_, residual_trace_ : solve diagnostics
    result_ : the full :class:`~hankelgd.solver.RecoveryResult`
    """

    def __init__(
        self,
        rank=1,
        alpha=0.0,
        p=None,
        lam=1.0 / 16.0,
        eta_scale=0.5,
        gamma_start=1.5,
        gamma_floor=1.05,
        gamma_decay=0.95,
        max_iters=1000,
        rel_tol=1e-5,
        mu=1.0,
        project=True,
        seed=None,
    ):
        self.rank = rank
        self.alpha = alpha
        self.p = p
        self.lam = lam
        self.eta_scale = eta_scale
        self.gamma_start = gamma_start
        self.gamma_floor = gamma_floor
        self.gamma_decay = gamma_decay
        self.max_iters = max_iters
        self.rel_tol = rel_tol
        self.mu = mu
        self.project = project
        self.seed = seed

    def _config(self):
        return SolverConfig(
            rank=self.rank,
            alpha=self.alpha,
            p=self.p,
            lam=self.lam,
            eta_scale=self.eta_scale,
            gamma_start=self.gamma_start,
            gamma_floor=self.gamma_floor,
            gamma_decay=self.gamma_decay,
            max_iters=self.max_iters,
            rel_tol=self.rel_tol,
            mu=self.mu,
            project=self.project,
            seed=self.seed,
        )

    def fit(self, X, y=None, mask=None):
        """Solve the completion problem for one signal.

        X : array of shape (n,), complex; NaN marks unobserved entries when
            ``mask`` is not given.
        mask : optional iterable of observed 0-based indices, or an
            :class:`~hankelgd.solver.ObservationMask`.
        """
        values = check_signal(X, allow_missing=True, name="X")
        n = values.shape[0]
        if mask is None:
            obs = ObservationMask.from_missing(values)
        elif isinstance(mask, ObservationMask):
            if mask.n != n:
                raise ValueError(
                    f"mask length {mask.n} does not match signal length {n}"
                )
            obs = mask
        else:
            obs = ObservationMask(mask, n)
        if not np.isfinite(values[obs.indices]).all():
            raise ValueError("observed entries contain non-finite values")
        geom = make_geometry(n)
        x_obs = np.zeros(n, dtype=np.complex128)
        x_obs[obs.indices] = values[obs.indices]
        f_obs = geom.reweight(x_obs)
        result = run(f_obs, obs, self._config(), geom)
        self.geometry_ = geom
        self.mask_ = obs
        self.result_ = result
        self.signal_ = result.x_hat
        self.outliers_ = geom.unweight(result.s_hat)
        self.n_iter_ = result.iterations
        self.converged_ = result.converged
        self.residual_trace_ = result.residual_trace
        return self

    def fit_transform(self, X, y=None, **fit_params):
        """Fit and return the completed signal."""
        return self.fit(X, y=y, **fit_params).signal_

    def transform(self, X=None):
        """Return the completed signal from a previous :meth:`fit`.

        The solve is coupled to the signal passed to fit; this estimator does
        not generalize to new signals.
        """
        if not hasattr(self, "signal_"):
            raise NotFittedError("fit must run before transform")
        return self.signal_
