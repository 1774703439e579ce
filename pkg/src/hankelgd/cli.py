"""Command line interface: synthesize, recover, and benchmark.

Exit codes: 0 success (recover: converged), 1 input error, 2 recover hit the
iteration cap. Batch commands record per-trial failures as rows and still
exit 0.
"""

import argparse
import json
import sys

import numpy as np

from .experiments import GridSpec, SpeedSpec, run_phase_grid, run_speed, run_trace
from .fileio import (
    FileFormatError,
    read_config,
    read_mask,
    read_signal,
    write_mask,
    write_report,
    write_signal,
)
from .geometry import make_geometry
from .solver import ObservationMask, SolverConfig, run
from .synth import ProblemInstance, make_instance

_CONFIG_FLAGS = (
    "rank", "alpha", "p", "lam", "eta_scale", "max_iters", "rel_tol", "mu",
    "seed",
)


def _add_solver_flags(parser, with_rank=True):
    if with_rank:
        parser.add_argument("--rank", type=int, help="target rank r")
    parser.add_argument("--alpha", type=float, help="outlier fraction in [0, 1)")
    parser.add_argument("--prob", dest="p", type=float,
                        help="sampling rate p (default: observed fraction)")
    parser.add_argument("--lambda", dest="lam", type=float,
                        help="balance regularization weight")
    parser.add_argument("--eta-scale", dest="eta_scale", type=float,
                        help="step size coefficient; eta = eta_scale / sigma_1")
    parser.add_argument("--max-iters", dest="max_iters", type=int,
                        help="iteration cap")
    parser.add_argument("--tol", dest="rel_tol", type=float,
                        help="relative residual stopping tolerance")
    parser.add_argument("--seed", type=int, help="RNG seed")
    parser.add_argument("--mu", type=float, help="incoherence parameter")
    parser.add_argument("--no-projection", dest="no_projection",
                        action="store_true",
                        help="disable the incoherence row projection")


def _solver_overrides(args):
    over = {}
    for name in _CONFIG_FLAGS:
        val = getattr(args, name, None)
        if val is not None:
            over[name] = val
    if getattr(args, "no_projection", False):
        over["project"] = False
    return over


def _parse_values(name, text):
    vals = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if ":" in chunk and name != "alpha":
            lo, hi = chunk.split(":", 1)
            vals.extend(range(int(lo), int(hi) + 1))
        elif name == "alpha":
            vals.append(float(chunk))
        else:
            vals.append(int(chunk))
    return vals


def _parse_axis(text):
    if "=" not in text:
        raise ValueError(f"axis spec {text!r} must look like name=v1,v2,...")
    name, values = text.split("=", 1)
    name = name.strip()
    if name not in ("rank", "alpha", "samples"):
        raise ValueError(f"axis name must be rank, alpha, or samples, got {name!r}")
    return name, _parse_values(name, values)


def cmd_recover(args):
    config_kwargs = {}
    config_n = None
    if args.config:
        config_kwargs, config_n = read_config(args.config)
    config_kwargs.update(_solver_overrides(args))
    if "rank" not in config_kwargs:
        raise ValueError("recover requires --rank (or 'rank' in the config file)")

    length = args.length if args.length is not None else config_n
    mask_idx = read_mask(args.mask) if args.mask else None
    if length is None:
        values, present = read_signal(args.signal)
        length = values.shape[0]
        if mask_idx is not None and mask_idx.max() + 1 > length:
            length = int(mask_idx.max() + 1)
            values, present = read_signal(args.signal, length=length)
    else:
        values, present = read_signal(args.signal, length=length)

    if mask_idx is not None:
        mask = ObservationMask(mask_idx, length)
        missing = mask.indices[~present[mask.indices]]
        if missing.size:
            raise ValueError(
                f"mask index {int(missing[0])} has no value in {args.signal}"
            )
    else:
        observed = present & np.isfinite(values)
        if not observed.any():
            raise ValueError(f"no finite observed entries in {args.signal}")
        mask = ObservationMask(np.flatnonzero(observed), length)

    geom = make_geometry(length)
    x_obs = np.zeros(length, dtype=np.complex128)
    x_obs[mask.indices] = values[mask.indices]
    f_obs = geom.reweight(x_obs)

    cfg = SolverConfig.from_dict(config_kwargs).validate()
    result = run(f_obs, mask, cfg, geom)

    out = args.out
    recovered_path = f"{out}.recovered.csv"
    outliers_path = f"{out}.outliers.csv"
    report_path = f"{out}.report.json"
    write_signal(recovered_path, result.x_hat)
    w_hat = geom.unweight(result.s_hat)
    write_signal(outliers_path, w_hat, indices=np.flatnonzero(result.s_hat != 0))
    params = dict(cfg.to_dict(), n=length, m=mask.m)
    write_report(report_path, result, params)
    print(
        f"wrote {recovered_path}, {outliers_path}, {report_path} "
        f"({result.iterations} iterations, residual "
        f"{result.residual_trace[-1]:.3e})"
    )
    return 0 if result.converged else 2


def cmd_synth(args):
    inst = make_instance(
        args.n,
        args.rank,
        m=args.samples,
        alpha=args.alpha,
        seed=args.seed,
        scale=args.scale,
        scheme="bernoulli" if args.bernoulli else "uniform",
        p=args.p,
    )
    geom = inst.geom
    out = args.out
    paths = {
        "truth": f"{out}.truth.csv",
        "observed": f"{out}.observed.csv",
        "mask": f"{out}.mask.csv",
        "outliers": f"{out}.outliers.csv",
        "manifest": f"{out}.manifest.json",
    }
    write_signal(paths["truth"], geom.unweight(inst.z_true))
    write_signal(paths["observed"], geom.unweight(inst.f_obs),
                 indices=inst.mask.indices)
    write_mask(paths["mask"], inst.mask.indices)
    write_signal(paths["outliers"], geom.unweight(inst.s_true),
                 indices=np.flatnonzero(inst.s_true != 0))
    manifest = {
        "n": int(args.n),
        "rank": int(args.rank),
        "samples": int(inst.mask.m),
        "alpha": float(args.alpha),
        "scale": float(args.scale),
        "seed": args.seed,
        "scheme": "bernoulli" if args.bernoulli else "uniform",
        "p": args.p,
        "files": {k: v for k, v in paths.items() if k != "manifest"},
    }
    with open(paths["manifest"], "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    print(f"wrote instance files with prefix {out}")
    return 0


def _load_manifest(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            manifest = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FileFormatError(path, exc.lineno, exc.msg) from None
    for key in ("n", "rank", "files"):
        if key not in manifest:
            raise FileFormatError(path, 1, f"manifest lacks {key!r}")
    return manifest


def _instance_from_manifest(path):
    manifest = _load_manifest(path)
    n = int(manifest["n"])
    geom = make_geometry(n)
    truth, _ = read_signal(manifest["files"]["truth"], length=n)
    mask = ObservationMask(read_mask(manifest["files"]["mask"]), n)
    observed, _ = read_signal(manifest["files"]["observed"], length=n)
    outliers, _ = read_signal(manifest["files"]["outliers"], length=n)
    return manifest, ProblemInstance(
        geom=geom,
        z_true=geom.reweight(truth),
        f_obs=mask.project(geom.reweight(observed)),
        mask=mask,
        s_true=geom.reweight(outliers),
        model=None,
        seed=manifest.get("seed"),
    )


def cmd_phase_grid(args):
    axis1, values1 = _parse_axis(args.axis1)
    axis2, values2 = _parse_axis(args.axis2)
    fixed, fixed_values = _parse_axis(args.fixed)
    if len(fixed_values) != 1:
        raise ValueError(f"--fixed takes exactly one value, got {fixed_values}")
    spec = GridSpec(
        n=args.n,
        axis1=axis1,
        axis1_values=values1,
        axis2=axis2,
        axis2_values=values2,
        fixed=fixed,
        fixed_value=fixed_values[0],
        trials=args.trials,
        seed=args.seed if args.seed is not None else 0,
    )
    overrides = {
        k: v
        for k, v in _solver_overrides(args).items()
        if k not in ("rank", "alpha", "seed")
    }
    _, cells = run_phase_grid(spec, args.out, overrides=overrides,
                              workers=args.workers)
    print(f"wrote {args.out} ({len(cells)} cells x {spec.trials} trials)")
    return 0


def cmd_speed(args):
    spec = SpeedSpec(
        n_values=_parse_values("n", args.n_list),
        rank=args.rank if args.rank is not None else 10,
        p=args.p if args.p is not None else 0.4,
        alpha=args.alpha if args.alpha is not None else 0.1,
        trials=args.trials,
        seed=args.seed if args.seed is not None else 0,
    )
    overrides = {
        k: v
        for k, v in _solver_overrides(args).items()
        if k not in ("rank", "alpha", "p", "seed")
    }
    _, summary, slope = run_speed(spec, args.out, overrides=overrides)
    slope_path = args.out.rsplit(".", 1)[0] + "_slope.json"
    with open(slope_path, "w", encoding="utf-8") as fh:
        json.dump(slope, fh, indent=2)
        fh.write("\n")
    print(f"wrote {args.out}; log-log slope {slope['slope']:.3f} "
          f"over n = {slope['n_used']}")
    return 0


def cmd_trace(args):
    if args.manifest:
        manifest, inst = _instance_from_manifest(args.manifest)
        rank = args.rank if args.rank is not None else int(manifest["rank"])
        alpha = args.alpha if args.alpha is not None else float(manifest["alpha"])
    else:
        for name in ("n", "rank", "samples"):
            if getattr(args, name) is None:
                raise ValueError(f"trace requires --{name} (or --manifest)")
        rank = args.rank
        alpha = args.alpha if args.alpha is not None else 0.0
        inst = make_instance(
            args.n, rank, m=args.samples, alpha=alpha,
            seed=args.seed, scale=args.scale,
        )
    overrides = {
        k: v
        for k, v in _solver_overrides(args).items()
        if k not in ("rank", "alpha")
    }
    cfg = SolverConfig(rank=rank, alpha=alpha, **overrides)
    rows, result = run_trace(inst, cfg, out_csv=args.out)
    print(f"wrote {args.out} ({len(rows)} iterations, "
          f"converged={result.converged})")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hankelgd",
        description="Robust low-rank Hankel completion of spectrally sparse "
                    "signals.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_rec = sub.add_parser("recover", help="recover a signal from a file")
    p_rec.add_argument("signal", help="signal CSV (index,re,im per line)")
    p_rec.add_argument("--mask", help="mask file (one observed index per line)")
    p_rec.add_argument("--config", help="JSON config mirroring solver fields")
    p_rec.add_argument("--length", type=int,
                       help="signal length n (default: inferred from indices)")
    p_rec.add_argument("--out", default="recovery", help="output file prefix")
    _add_solver_flags(p_rec)
    p_rec.set_defaults(func=cmd_recover)

    p_syn = sub.add_parser("synth", help="write a synthetic instance to files")
    p_syn.add_argument("--n", type=int, required=True, help="signal length")
    p_syn.add_argument("--rank", type=int, required=True)
    p_syn.add_argument("--samples", type=int, help="observed entry count m")
    p_syn.add_argument("--alpha", type=float, default=0.0)
    p_syn.add_argument("--scale", type=float, default=10.0,
                       help="outlier magnitude multiplier")
    p_syn.add_argument("--seed", type=int)
    p_syn.add_argument("--bernoulli", action="store_true",
                       help="Bernoulli(p) sampling instead of uniform m")
    p_syn.add_argument("--prob", dest="p", type=float,
                       help="Bernoulli sampling rate")
    p_syn.add_argument("--out", default="instance", help="output file prefix")
    p_syn.set_defaults(func=cmd_synth)

    p_grid = sub.add_parser("phase-grid",
                            help="success-fraction grid over two parameters")
    p_grid.add_argument("--n", type=int, required=True)
    p_grid.add_argument("--axis1", required=True,
                        help="e.g. rank=1:13 or alpha=0.05,0.1,0.2")
    p_grid.add_argument("--axis2", required=True)
    p_grid.add_argument("--fixed", required=True, help="e.g. samples=50")
    p_grid.add_argument("--trials", type=int, default=50)
    p_grid.add_argument("--workers", type=int, default=0,
                        help="process pool size (0 = sequential)")
    p_grid.add_argument("--out", default="phase_grid.csv")
    _add_solver_flags(p_grid, with_rank=False)
    p_grid.set_defaults(func=cmd_phase_grid)

    p_speed = sub.add_parser("speed", help="wall-time scaling over n")
    p_speed.add_argument("--n-list", dest="n_list",
                         default="1024,2048,4096,8192,16384")
    p_speed.add_argument("--trials", type=int, default=20)
    p_speed.add_argument("--out", default="speed.csv")
    _add_solver_flags(p_speed)
    p_speed.set_defaults(func=cmd_speed)

    p_trace = sub.add_parser("trace",
                             help="per-iteration diagnostics on a synthetic "
                                  "instance")
    p_trace.add_argument("--manifest", help="instance manifest from synth")
    p_trace.add_argument("--n", type=int)
    p_trace.add_argument("--samples", type=int)
    p_trace.add_argument("--scale", type=float, default=10.0)
    p_trace.add_argument("--out", default="trace.csv")
    _add_solver_flags(p_trace)
    p_trace.set_defaults(func=cmd_trace)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
