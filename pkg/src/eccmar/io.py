"""Dataset files and run configuration.

Datasets are long-format CSV with header ``time,row,col,value``: one line
per cell, labels mapped to indices in first-appearance order, strictly
increasing time, and a complete rectangular panel.
"""

from __future__ import annotations

import csv

import numpy as np

from .dgp import MatrixSeries
from .errors import ConfigError, DataError

FLOAT_FMT = "{:.17g}"


def ingest_csv(path) -> MatrixSeries:
    """Read a long-format dataset file into a dense series."""
    times: list = []
    row_labels: list[str] = []
    col_labels: list[str] = []
    cells: dict = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if [h.strip() for h in header] != ["time", "row", "col", "value"]:
            raise DataError(f"{path}:1: expected header time,row,col,value")
        for lineno, parts in enumerate(reader, start=2):
            if not parts:
                continue
            if len(parts) != 4:
                raise DataError(f"{path}:{lineno}: expected 4 fields, got {len(parts)}")
            t_raw, row, col, val_raw = (p.strip() for p in parts)
            try:
                value = float(val_raw)
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad value {val_raw!r}") from None
            if not np.isfinite(value):
                raise DataError(f"{path}:{lineno}: non-finite value")
            if not times or t_raw != times[-1]:
                if t_raw in times:
                    raise DataError(f"{path}:{lineno}: non-monotone time {t_raw!r}")
                times.append(t_raw)
            if row not in row_labels:
                row_labels.append(row)
            if col not in col_labels:
                col_labels.append(col)
            key = (t_raw, row, col)
            if key in cells:
                raise DataError(f"{path}:{lineno}: duplicate cell {key}")
            cells[key] = value
    if not cells:
        raise DataError(f"{path}: no data rows")
    t_n, m, n = len(times), len(row_labels), len(col_labels)
    data = np.empty((t_n, m, n))
    for ti, t_raw in enumerate(times):
        for ri, row in enumerate(row_labels):
            for ci, col in enumerate(col_labels):
                key = (t_raw, row, col)
                if key not in cells:
                    raise DataError(f"{path}: missing cell {key}")
                data[ti, ri, ci] = cells[key]
    if len(cells) != t_n * m * n:
        raise DataError(f"{path}: {len(cells)} cells, expected {t_n * m * n}")
    return MatrixSeries(data, row_labels=row_labels, col_labels=col_labels)


def export_csv(series: MatrixSeries, path) -> None:
    """Write a series in the long dataset format."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time", "row", "col", "value"])
        for t in range(series.T):
            for ri, row in enumerate(series.row_labels):
                for ci, col in enumerate(series.col_labels):
                    writer.writerow(
                        [t, row, col, FLOAT_FMT.format(series.data[t, ri, ci])]
                    )


_INT_KEYS = {"m", "n", "r1", "r2", "p", "T", "seed", "replications",
             "max_iterations", "burnin", "max_p", "adf_lags", "r"}
_FLOAT_KEYS = {"tolerance", "alpha_level"}
_STR_KEYS = {"output_dir", "dataset", "ranks", "study", "designs", "sizes",
             "restrictions", "fit", "side", "kind", "payload", "critical_values"}
KNOWN_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS


def parse_config(path) -> dict:
    """Parse a key=value run configuration; unknown keys are rejected."""
    config: dict = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in KNOWN_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            if key in config:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            try:
                if key in _INT_KEYS:
                    config[key] = int(value)
                elif key in _FLOAT_KEYS:
                    config[key] = float(value)
                else:
                    config[key] = value
            except ValueError:
                raise ConfigError(
                    f"{path}:{lineno}: bad value {value!r} for {key!r}"
                ) from None
    return config


def require_keys(config: dict, keys, command: str) -> None:
    missing = [k for k in keys if k not in config]
    if missing:
        raise ConfigError(
            f"{command}: missing config key(s): {', '.join(missing)}"
        )
