"""Batch experiment harnesses emitting stable CSV tables.

Per-trial seeds are derived from a stable SHA-256 hash of the base seed, the
cell coordinates, and the trial number, so grids reproduce bit-identically
across machines and are independent of execution order (cells may run on a
process pool). Wall-clock columns are the only non-reproducible content.
"""

import csv
import hashlib
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .metrics import aligned_distance, classify_success, relative_error
from .solver import SolverConfig, run
from .svd import truncated_svd_hankel
from .synth import make_instance

AXIS_NAMES = ("rank", "alpha", "samples")

GRID_TRIAL_HEADER = ["rank", "alpha", "samples", "trial", "seed", "success",
                     "rel_err", "iterations", "seconds"]
GRID_CELL_HEADER = ["rank", "alpha", "samples", "trials", "successes",
                    "success_fraction"]
SPEED_TRIAL_HEADER = ["n", "trial", "seed", "converged", "iterations",
                      "seconds", "rel_err"]
SPEED_SUMMARY_HEADER = ["n", "trials", "converged_trials", "mean_seconds",
                        "std_seconds", "mean_iterations"]
TRACE_HEADER = ["k", "residual", "rel_err", "aligned_dist"]


def _canon(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(int(v))


def trial_seed(seed_base, trial, **coords):
    """Stable 63-bit seed from the base seed, cell coordinates, and trial.

    The key is ``seed|name=value|...|trial=t`` with names sorted and floats in
    shortest-round-trip form, hashed with SHA-256; identical inputs give the
    same seed on any machine.
    """
    parts = [f"{k}={_canon(v)}" for k, v in sorted(coords.items())]
    key = f"{int(seed_base)}|" + "|".join(parts) + f"|trial={int(trial)}"
    digest = hashlib.sha256(key.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


@dataclass
class GridSpec:
    """Two swept parameters, one fixed, out of {rank, alpha, samples}."""

    n: int
    axis1: str
    axis1_values: list
    axis2: str
    axis2_values: list
    fixed: str
    fixed_value: object
    trials: int = 50
    seed: int = 0

    def __post_init__(self):
        names = {self.axis1, self.axis2, self.fixed}
        if len(names) != 3 or names != set(AXIS_NAMES):
            raise ValueError(
                f"axes plus fixed must cover {AXIS_NAMES} exactly, got "
                f"{self.axis1}, {self.axis2}, {self.fixed}"
            )
        if not self.axis1_values or not self.axis2_values:
            raise ValueError("axis value lists must be non-empty")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")

    def cells(self):
        for v1 in self.axis1_values:
            for v2 in self.axis2_values:
                params = {
                    self.axis1: v1,
                    self.axis2: v2,
                    self.fixed: self.fixed_value,
                }
                yield int(params["rank"]), float(params["alpha"]), int(params["samples"])


@dataclass
class SpeedSpec:
    """Timing sweep over n at fixed rank, sampling rate, and outlier level."""

    n_values: list = field(default_factory=lambda: [2 ** k for k in range(10, 15)])
    rank: int = 10
    p: float = 0.4
    alpha: float = 0.1
    trials: int = 20
    seed: int = 0

    def __post_init__(self):
        if list(self.n_values) != sorted(set(self.n_values)):
            raise ValueError("n_values must be strictly increasing")


def run_trial(n, rank, samples, alpha, seed, overrides=None):
    """One synthetic instance solved end to end; returns a result dict."""
    overrides = dict(overrides or {})
    try:
        inst = make_instance(n, rank, m=samples, alpha=alpha, seed=seed)
        cfg = SolverConfig(rank=rank, alpha=alpha, seed=seed, **overrides)
        result = run(inst.f_obs, inst.mask, cfg, inst.geom)
        rel = relative_error(result.z_hat, inst.z_true)
        return {
            "seed": seed,
            "success": classify_success(rel),
            "rel_err": rel,
            "iterations": result.iterations,
            "seconds": result.wall_time_seconds,
            "converged": result.converged,
            "error": "",
        }
    except Exception as exc:  # a failed cell is a row, never an abort
        return {
            "seed": seed,
            "success": False,
            "rel_err": float("inf"),
            "iterations": 0,
            "seconds": 0.0,
            "converged": False,
            "error": f"{type(exc).__name__}: {exc}",
        }


def _grid_task(task):
    rank, alpha, samples, trial, n, seed, overrides = task
    out = run_trial(n, rank, samples, alpha, seed, overrides)
    return (rank, alpha, samples, trial), out


def run_phase_grid(spec, out_csv, overrides=None, workers=0):
    """Per-trial rows plus per-cell success fractions.

    Writes ``out_csv`` and a companion ``<stem>_cells<suffix>`` aggregate.
    Returns (trial rows, cell rows).
    """
    tasks = []
    for rank, alpha, samples in spec.cells():
        for trial in range(spec.trials):
            seed = trial_seed(spec.seed, trial, rank=rank, alpha=alpha,
                              samples=samples)
            tasks.append((rank, alpha, samples, trial, spec.n, seed, overrides))

    results = {}
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for key, out in pool.map(_grid_task, tasks):
                results[key] = out
    else:
        for task in tasks:
            key, out = _grid_task(task)
            results[key] = out

    trial_rows = []
    cell_rows = []
    for rank, alpha, samples in spec.cells():
        successes = 0
        for trial in range(spec.trials):
            out = results[(rank, alpha, samples, trial)]
            successes += int(out["success"])
            trial_rows.append([
                rank, alpha, samples, trial, out["seed"], out["success"],
                out["rel_err"], out["iterations"], out["seconds"],
            ])
        cell_rows.append([
            rank, alpha, samples, spec.trials, successes,
            successes / spec.trials,
        ])

    out_csv = Path(out_csv)
    write_csv(out_csv, GRID_TRIAL_HEADER, trial_rows)
    cells_path = out_csv.with_name(out_csv.stem + "_cells" + out_csv.suffix)
    write_csv(cells_path, GRID_CELL_HEADER, cell_rows)
    return trial_rows, cell_rows


def fit_loglog_slope(ns, seconds):
    """Least-squares slope of log(seconds) against log(n)."""
    ns = np.asarray(ns, dtype=float)
    seconds = np.asarray(seconds, dtype=float)
    return float(np.polyfit(np.log(ns), np.log(seconds), 1)[0])


def run_speed(spec, out_csv, overrides=None):
    """Wall-time sweep over n; aggregate rows plus a log-log slope.

    Writes ``out_csv`` (per trial), ``<stem>_summary<suffix>`` (per n), and
    returns (trial rows, summary rows, slope dict). The slope uses the mean
    time of the largest three n values with at least one converged trial;
    non-converged trials are excluded with a warning.
    """
    trial_rows = []
    summary_rows = []
    mean_by_n = {}
    for n in spec.n_values:
        samples = int(round(spec.p * n))
        secs = []
        iters = []
        n_conv = 0
        for trial in range(spec.trials):
            seed = trial_seed(spec.seed, trial, n=n, rank=spec.rank,
                              alpha=spec.alpha, samples=samples)
            out = run_trial(n, spec.rank, samples, spec.alpha, seed, overrides)
            trial_rows.append([
                n, trial, out["seed"], out["converged"], out["iterations"],
                out["seconds"], out["rel_err"],
            ])
            if out["converged"]:
                n_conv += 1
                secs.append(out["seconds"])
                iters.append(out["iterations"])
            else:
                warnings.warn(
                    f"speed trial n={n} trial={trial} did not converge; "
                    "excluded from the slope",
                    RuntimeWarning,
                )
        mean_s = float(np.mean(secs)) if secs else float("nan")
        std_s = float(np.std(secs)) if secs else float("nan")
        mean_it = float(np.mean(iters)) if iters else float("nan")
        summary_rows.append([n, spec.trials, n_conv, mean_s, std_s, mean_it])
        if secs:
            mean_by_n[n] = mean_s

    usable = sorted(mean_by_n)[-3:]
    slope = {
        "slope": fit_loglog_slope(usable, [mean_by_n[n] for n in usable])
        if len(usable) >= 2
        else float("nan"),
        "n_used": usable,
    }

    out_csv = Path(out_csv)
    write_csv(out_csv, SPEED_TRIAL_HEADER, trial_rows)
    summary_path = out_csv.with_name(out_csv.stem + "_summary" + out_csv.suffix)
    write_csv(summary_path, SPEED_SUMMARY_HEADER, summary_rows)
    return trial_rows, summary_rows, slope


def run_trace(instance, cfg, out_csv=None):
    """Per-iteration residual, recovery error, and aligned factor distance.

    Needs ground truth, so it takes a synthetic :class:`ProblemInstance`. The
    factor reference comes from the exact truncated SVD of the true lift.
    """
    ref = truncated_svd_hankel(instance.z_true, cfg.rank, instance.geom)
    root = np.sqrt(ref.sigma)
    L_ref = ref.U * root
    R_ref = ref.V * root

    rows = {}

    def record(state):
        rows[state.k] = [
            state.k,
            state.residual_trace[-1],
            relative_error(state.z, instance.z_true),
            aligned_distance(state.L, state.R, L_ref, R_ref).d,
        ]

    result = run(instance.f_obs, instance.mask, cfg, instance.geom, callback=record)
    trace_rows = [rows[k] for k in sorted(rows)]
    if out_csv is not None:
        write_csv(out_csv, TRACE_HEADER, trace_rows)
    return trace_rows, result
