"""Trace files.

A trace is written as two files:

* ``<path>``: the plot-ready CSV with header ``k,f,grad_norm,scan_index,value_evals``,
  LF line endings, floats in shortest round-trip form;
* ``<path>.json``: the run metadata and per-iteration points (z_k, x_k, f(z_k))
  needed to rebuild the full :class:`Trace` for verification.

The CSV alone is enough for plotting and for the value-monotonicity check.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .core import RunConfig
from .optimizer import IterateRecord, Termination, Trace

CSV_HEADER = "k,f,grad_norm,scan_index,value_evals"
SIDECAR_FORMAT = "gridshift-trace/1"


class MalformedTraceError(ValueError):
    pass


@dataclass(frozen=True)
class CsvRow:
    k: int
    f: float
    grad_norm: float
    scan_index: int
    value_evals: int


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def format_csv(trace: Trace) -> str:
    lines = [CSV_HEADER]
    for r in trace.records:
        lines.append(
            f"{r.k},{float(r.f_x_k)!r},{float(r.grad_norm)!r},{r.scan_best_index},{r.value_evals_cum}"
        )
    return "\n".join(lines) + "\n"


def format_sidecar(trace: Trace) -> str:
    meta = {
        "format": SIDECAR_FORMAT,
        "objective": trace.objective_name,
        "algorithm": trace.algorithm,
        "termination": trace.termination.value,
        "config": trace.config.to_dict(),
        "value_evals": trace.value_evals,
        "gradient_evals": trace.gradient_evals,
        "f_z": [r.f_z_k for r in trace.records],
        "z": [list(r.z_k) for r in trace.records],
        "x": [list(r.x_k) for r in trace.records],
    }
    return json.dumps(meta, indent=None, separators=(",", ":")) + "\n"


def write_trace(trace: Trace, path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_csv(trace))
    with open(sidecar_path(path), "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_sidecar(trace))
    return path


def parse_csv(text: str) -> list[CsvRow]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != CSV_HEADER:
        raise MalformedTraceError(f"expected header {CSV_HEADER!r}")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 5:
            raise MalformedTraceError(f"line {lineno}: expected 5 fields, got {len(parts)}")
        try:
            row = CsvRow(int(parts[0]), float(parts[1]), float(parts[2]), int(parts[3]), int(parts[4]))
        except ValueError as exc:
            raise MalformedTraceError(f"line {lineno}: {exc}") from None
        if row.k != len(rows):
            raise MalformedTraceError(f"line {lineno}: expected k={len(rows)}, got {row.k}")
        rows.append(row)
    if not rows:
        raise MalformedTraceError("trace has no records")
    return rows


def read_csv(path) -> list[CsvRow]:
    with open(path, encoding="ascii", newline="") as fh:
        return parse_csv(fh.read())


def parse_trace(csv_text: str, sidecar_text: str) -> Trace:
    rows = parse_csv(csv_text)
    try:
        meta = json.loads(sidecar_text)
        if meta.get("format") != SIDECAR_FORMAT:
            raise MalformedTraceError("unrecognised sidecar format")
        zs, xs, fz = meta["z"], meta["x"], meta["f_z"]
        config = RunConfig.from_dict(meta["config"])
        termination = Termination(meta["termination"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, MalformedTraceError):
            raise
        raise MalformedTraceError(f"bad sidecar: {exc}") from None
    if not (len(zs) == len(xs) == len(fz) == len(rows)):
        raise MalformedTraceError("sidecar and CSV disagree on the number of records")
    records = [
        IterateRecord(
            k=row.k,
            z_k=tuple(float(v) for v in z),
            x_k=tuple(float(v) for v in x),
            f_x_k=row.f,
            f_z_k=float(f_z),
            grad_norm=row.grad_norm,
            scan_best_index=row.scan_index,
            value_evals_cum=row.value_evals,
        )
        for row, z, x, f_z in zip(rows, zs, xs, fz)
    ]
    return Trace(
        records=records,
        config=config,
        objective_name=meta["objective"],
        termination=termination,
        algorithm=meta.get("algorithm", "basin"),
        value_evals=int(meta.get("value_evals", 0)),
        gradient_evals=int(meta.get("gradient_evals", 0)),
    )


def read_trace(path) -> Trace:
    path = Path(path)
    with open(path, encoding="ascii", newline="") as fh:
        csv_text = fh.read()
    with open(sidecar_path(path), encoding="ascii", newline="") as fh:
        side_text = fh.read()
    return parse_trace(csv_text, side_text)
