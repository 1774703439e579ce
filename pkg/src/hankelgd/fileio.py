"""Disk formats: signal and mask CSVs, config JSON, run reports.

Signal files carry one entry per line as ``index,re,im`` with 0-based strictly
increasing indices; absent lines mean unobserved entries. Mask files carry one
0-based index per line. Both formats are plain UTF-8 and diff-friendly. Float
fields are written with shortest-round-trip repr, so rewriting identical data
is byte-identical.
"""

import json

import numpy as np

from .solver import SolverConfig


class FileFormatError(ValueError):
    """Parse failure that knows its file and line."""

    def __init__(self, path, line_no, message):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{self.path}:{line_no}: {message}")


def _fmt(x):
    return repr(float(x))


def write_signal(path, values, indices=None):
    """Write entries (all of them, or only the given indices) as index,re,im."""
    values = np.asarray(values)
    if indices is None:
        indices = np.arange(values.shape[0])
    with open(path, "w", encoding="utf-8") as fh:
        for i in indices:
            v = complex(values[int(i)])
            fh.write(f"{int(i)},{_fmt(v.real)},{_fmt(v.imag)}\n")


def read_signal(path, length=None):
    """Parse a signal file into (values, present) arrays of length n.

    n is ``length`` when given, otherwise last index + 1. Missing lines leave
    present False and the value 0.
    """
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise FileFormatError(
                    path, line_no,
                    f"expected 'index,re,im', got {len(parts)} field(s)",
                )
            try:
                idx = int(parts[0])
            except ValueError:
                raise FileFormatError(
                    path, line_no, f"index {parts[0]!r} is not an integer"
                ) from None
            try:
                re, im = float(parts[1]), float(parts[2])
            except ValueError:
                raise FileFormatError(
                    path, line_no, "re/im fields must be floats"
                ) from None
            if idx < 0:
                raise FileFormatError(path, line_no, f"negative index {idx}")
            if entries and idx <= entries[-1][0]:
                raise FileFormatError(
                    path, line_no,
                    f"index {idx} not strictly increasing after {entries[-1][0]}",
                )
            entries.append((idx, complex(re, im), line_no))
    if not entries:
        raise FileFormatError(path, 1, "no entries found")
    n = entries[-1][0] + 1 if length is None else int(length)
    values = np.zeros(n, dtype=np.complex128)
    present = np.zeros(n, dtype=bool)
    for idx, val, line_no in entries:
        if idx >= n:
            raise FileFormatError(
                path, line_no, f"index {idx} outside declared length {n}"
            )
        values[idx] = val
        present[idx] = True
    return values, present


def write_mask(path, indices):
    with open(path, "w", encoding="utf-8") as fh:
        for i in indices:
            fh.write(f"{int(i)}\n")


def read_mask(path):
    """Parse a mask file into a sorted index array (validated by the caller)."""
    idx = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                i = int(line)
            except ValueError:
                raise FileFormatError(
                    path, line_no, f"mask entry {line!r} is not an integer"
                ) from None
            if i < 0:
                raise FileFormatError(path, line_no, f"negative index {i}")
            idx.append(i)
    if not idx:
        raise FileFormatError(path, 1, "mask file is empty")
    return np.asarray(idx, dtype=np.intp)


def read_config(path):
    """Load solver options from JSON; returns (SolverConfig kwargs, n or None).

    Keys mirror SolverConfig field names; the optional extra key "n" declares
    the signal length.
    """
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FileFormatError(path, exc.lineno, exc.msg) from None
    if not isinstance(data, dict):
        raise FileFormatError(path, 1, "config must be a JSON object")
    n = data.pop("n", None)
    unknown = set(data) - set(SolverConfig._JSON_FIELDS)
    if unknown:
        raise FileFormatError(
            path, 1, f"unknown config keys: {sorted(unknown)}"
        )
    return data, n


def write_report(path, result, params):
    """JSON run report: solve diagnostics plus the effective parameters."""
    report = {
        "parameters": params,
        "iterations": int(result.iterations),
        "converged": bool(result.converged),
        "initial_residual": float(result.residual_trace[0]),
        "final_residual": float(result.residual_trace[-1]),
        "residual_trace": [float(r) for r in result.residual_trace],
        "wall_time_seconds": float(result.wall_time_seconds),
        "init_svd_converged": bool(result.init_svd_converged),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
