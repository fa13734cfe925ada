"""CSV parsing for the documented run-artefact schemas."""

from __future__ import annotations

from pathlib import Path

import numpy as np


class SchemaError(ValueError):
    """A CSV did not match the documented schema; names the offending column."""


def read_csv(path: str | Path, required: list[str]) -> tuple[dict, dict]:
    """Parse a run artefact: ``# key=value`` metadata lines, a header row,
    then float data rows.  Returns (meta, columns)."""
    meta: dict[str, str] = {}
    header: list[str] | None = None
    rows: list[list[float]] = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                meta[key.strip()] = val.strip()
                continue
            if header is None:
                header = [c.strip() for c in line.split(",")]
                continue
            rows.append([float(v) for v in line.split(",")])
    if header is None:
        raise SchemaError(f"{path}: no header row found")
    for col in required:
        if col not in header:
            raise SchemaError(f"{path}: missing required column {col!r}")
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=float)
    if data.shape[1] != len(header):
        raise SchemaError(f"{path}: ragged rows versus header {header}")
    return meta, {name: data[:, i] for i, name in enumerate(header)}


def meta_float(meta: dict, key: str, path) -> float:
    if key not in meta:
        raise SchemaError(f"{path}: metadata key {key!r} required for this figure")
    return float(meta[key])


def fit_loglog_slope(x: np.ndarray, y: np.ndarray) -> float:
    """Least-squares slope of log y against log x (positive entries only)."""
    mask = (x > 0) & (y > 0)
    if int(np.count_nonzero(mask)) < 2:
        raise SchemaError("not enough positive points for a loglog fit")
    return float(np.polyfit(np.log(x[mask]), np.log(y[mask]), 1)[0])
