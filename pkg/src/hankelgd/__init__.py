"""Robust low-rank Hankel matrix completion for spectrally sparse signals.

The solver recovers a length-n complex signal from partially observed,
sparsely corrupted samples by factored gradient descent on the implicit
n1 x n2 Hankel lift, with every matrix product evaluated through FFT
convolutions at O(r n log n + r^2 n) per iteration.
"""

from .estimator import HankelCompleter
from .fastops import HankelOperator, g_apply_left, g_apply_right, gstar_lowrank, sparsify
from .geometry import HankelGeometry, make_geometry
from .metrics import DistanceReport, aligned_distance, classify_success, relative_error
from .solver import (
    DivergenceError,
    ObservationMask,
    RecoveryResult,
    SolverConfig,
    SolverState,
    evaluate_loss,
    gradient,
    initialize,
    project_rows,
    run,
    step,
    update_outliers,
)
from .svd import TruncatedSVD, lanczos_svd, truncated_svd_hankel
from .synth import (
    ProblemInstance,
    SpectralModel,
    generate_signal,
    inject_outliers,
    make_instance,
    model_signal,
    sample_mask,
)

__version__ = "0.1.0"

__all__ = [
    "DistanceReport",
    "DivergenceError",
    "HankelCompleter",
    "HankelGeometry",
    "HankelOperator",
    "ObservationMask",
    "ProblemInstance",
    "RecoveryResult",
    "SolverConfig",
    "SolverState",
    "SpectralModel",
    "TruncatedSVD",
    "aligned_distance",
    "classify_success",
    "evaluate_loss",
    "g_apply_left",
    "g_apply_right",
    "generate_signal",
    "gradient",
    "gstar_lowrank",
    "initialize",
    "inject_outliers",
    "lanczos_svd",
    "make_geometry",
    "make_instance",
    "model_signal",
    "project_rows",
    "relative_error",
    "run",
    "sample_mask",
    "sparsify",
    "step",
    "truncated_svd_hankel",
    "update_outliers",
]
