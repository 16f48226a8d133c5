"""Fixed CSV schemas and a strict reader.

Floats are written with ``repr`` (shortest round-trip form), so parsing a file
and emitting it again reproduces it byte for byte.
"""
from __future__ import annotations

import csv
import io
import math
from pathlib import Path

TRAIN_LOG = ("iteration", "mean_return", "actor_loss", "critic_loss", "clip_frac", "kl_proxy", "wall_s")
EVAL = ("episode", "step", "time_s", "pos_err_m", "ang_err_rad")
SUMMARY = (
    "config",
    "seed",
    "scenario",
    "median_final_pos_err_m",
    "mean_final_pos_err_m",
    "median_final_ang_err_rad",
    "success_rate",
)
EPISODES = ("config", "seed", "scenario", "episode", "final_pos_err_m", "final_ang_err_rad", "success", "return")
CURVES = ("config", "scenario", "step", "time_s", "pos_err_mean", "pos_err_std", "ang_err_mean", "ang_err_std", "n_seeds")

_INT_COLUMNS = {"iteration", "episode", "step", "seed", "success", "n_seeds"}
_STR_COLUMNS = {"config", "scenario"}


class CsvSchemaError(ValueError):
    pass


def format_value(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, int)) or (hasattr(value, "dtype") and value.dtype.kind in "iub"):
        return str(int(value))
    return repr(float(value))


def rows_to_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise CsvSchemaError(f"row has {len(row)} fields, expected {len(header)}")
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(rows_to_text(header, rows))


def append_csv_row(path, header, row) -> None:
    with open(path, "a") as fh:
        fh.write(rows_to_text(header, [row]).split("\n", 1)[1])


def _parse(column, text, where):
    if column in _STR_COLUMNS:
        return text
    try:
        if column in _INT_COLUMNS:
            return int(text)
        return float(text)
    except ValueError:
        raise CsvSchemaError(f"{where}: column {column!r}: cannot parse {text!r}") from None


def read_csv(path, header) -> list[tuple]:
    """Parse a CSV that must match ``header`` exactly."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            found = next(reader)
        except StopIteration:
            raise CsvSchemaError(f"{path}: empty file, expected header {','.join(header)}") from None
        if tuple(found) != tuple(header):
            raise CsvSchemaError(f"{path}: row 1: header {found} != expected {list(header)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise CsvSchemaError(f"{path}: row {lineno}: {len(row)} fields, expected {len(header)}")
            rows.append(tuple(_parse(c, v, f"{path}: row {lineno}") for c, v in zip(header, row)))
    return rows


def check_nonnegative(path, rows, header, columns) -> None:
    for lineno, row in enumerate(rows, start=2):
        for c in columns:
            v = row[header.index(c)]
            if math.isnan(v) or v < 0:
                raise CsvSchemaError(f"{path}: row {lineno}: column {c!r} must be a non-negative number, got {v}")
