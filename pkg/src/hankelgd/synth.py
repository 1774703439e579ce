"""Synthetic recovery problems: spectrally sparse signals, masks, outliers.

A sum of r complex sinusoids lifts to a Hankel matrix of rank exactly r
(when r fits inside both matrix sides), which makes these instances exact
ground truth for completion experiments.
"""

from dataclasses import dataclass

import numpy as np

from .geometry import make_geometry
from .solver import ObservationMask

DEFAULT_OUTLIER_SCALE = 10.0
_MAX_ATTEMPTS = 10_000


@dataclass
class SpectralModel:
    """r active frequencies in [0, 1) with complex amplitudes."""

    frequencies: np.ndarray
    amplitudes: np.ndarray
    n: int


@dataclass
class ProblemInstance:
    """Ground truth plus corrupted partial observations, all reweighted."""

    geom: object
    z_true: np.ndarray
    f_obs: np.ndarray
    mask: ObservationMask
    s_true: np.ndarray
    model: SpectralModel
    seed: object = None


def model_signal(model):
    """Evaluate x_t = sum_j d_j exp(2 pi i f_j t) for t = 1..n."""
    t = np.arange(1, model.n + 1)
    basis = np.exp(2j * np.pi * np.outer(t, model.frequencies))
    return basis @ model.amplitudes


def _min_wrap_separation(freqs):
    if freqs.shape[0] < 2:
        return np.inf
    diff = np.abs(freqs[:, None] - freqs[None, :])
    diff = np.minimum(diff, 1.0 - diff)
    iu = np.triu_indices(freqs.shape[0], k=1)
    return float(diff[iu].min())


def generate_signal(n, r, sep_min=None, rng=None, amp_range=(0.5, 1.5)):
    """Random signal with exactly r active, well-separated frequencies.

    Frequencies are uniform on [0, 1), redrawn jointly until every wrap-around
    pairwise gap is at least sep_min (default 1.5/n). Amplitude magnitudes are
    uniform on amp_range with uniform phases, which keeps the lifted matrix
    modestly conditioned.
    """
    if rng is None:
        rng = np.random.default_rng()
    n = int(n)
    r = int(r)
    if r < 1:
        raise ValueError(f"need at least one frequency, got r={r}")
    if sep_min is None:
        sep_min = 1.5 / n
    if r * sep_min >= 1.0:
        raise ValueError(
            f"cannot separate {r} frequencies by {sep_min} on the unit circle"
        )
    for _ in range(_MAX_ATTEMPTS):
        freqs = rng.uniform(0.0, 1.0, size=r)
        if _min_wrap_separation(freqs) >= sep_min:
            break
    else:
        raise RuntimeError(
            f"no separated frequency set found in {_MAX_ATTEMPTS} attempts"
        )
    mags = rng.uniform(amp_range[0], amp_range[1], size=r)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=r)
    amps = mags * np.exp(1j * phases)
    model = SpectralModel(frequencies=freqs, amplitudes=amps, n=n)
    return model, model_signal(model)


def sample_mask(n, m=None, rng=None, scheme="uniform", p=None):
    """Observation mask: exactly m uniform indices, or Bernoulli(p) per index."""
    if rng is None:
        rng = np.random.default_rng()
    n = int(n)
    if scheme == "uniform":
        if m is None:
            raise ValueError("uniform sampling requires m")
        m = int(m)
        if not 0 < m <= n:
            raise ValueError(f"m must be in [1, {n}], got {m}")
        idx = np.sort(rng.choice(n, size=m, replace=False))
        return ObservationMask(idx, n)
    if scheme == "bernoulli":
        if p is None or not 0.0 < p <= 1.0:
            raise ValueError(f"bernoulli sampling requires p in (0, 1], got {p}")
        idx = np.flatnonzero(rng.random(n) < p)
        return ObservationMask(idx, n)  # raises when the draw is empty
    raise ValueError(f"unknown sampling scheme {scheme!r}")


def inject_outliers(z_true, mask, alpha, scale=DEFAULT_OUTLIER_SCALE, rng=None):
    """Corrupt floor(alpha * m) observed entries with heavy additive outliers.

    Real and imaginary parts are uniform on +-scale times the mean absolute
    real (resp. imaginary) part of the full ground-truth vector. Returns the
    masked observation vector and the outlier vector.
    """
    if rng is None:
        rng = np.random.default_rng()
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must be in [0, 1), got {alpha}")
    z_true = np.asarray(z_true, dtype=np.complex128)
    count = int(np.floor(alpha * mask.m + 1e-9))
    s_true = np.zeros_like(z_true)
    if count > 0:
        where = rng.choice(mask.indices, size=count, replace=False)
        half_re = scale * np.mean(np.abs(z_true.real))
        half_im = scale * np.mean(np.abs(z_true.imag))
        s_true[where] = rng.uniform(-half_re, half_re, size=count) + 1j * rng.uniform(
            -half_im, half_im, size=count
        )
    f_obs = mask.project(z_true + s_true)
    return f_obs, s_true


def make_instance(
    n,
    rank,
    m=None,
    alpha=0.0,
    seed=None,
    scale=DEFAULT_OUTLIER_SCALE,
    sep_min=None,
    scheme="uniform",
    p=None,
):
    """Full synthetic problem, deterministic for a given seed."""
    rng = np.random.default_rng(seed)
    geom = make_geometry(n)
    if rank > min(geom.n1, geom.n2):
        raise ValueError(
            f"rank {rank} exceeds min(n1, n2) = {min(geom.n1, geom.n2)}"
        )
    model, x = generate_signal(n, rank, sep_min=sep_min, rng=rng)
    z_true = geom.reweight(x)
    mask = sample_mask(n, m=m, rng=rng, scheme=scheme, p=p)
    f_obs, s_true = inject_outliers(z_true, mask, alpha, scale=scale, rng=rng)
    return ProblemInstance(
        geom=geom,
        z_true=z_true,
        f_obs=f_obs,
        mask=mask,
        s_true=s_true,
        model=model,
        seed=seed,
    )
