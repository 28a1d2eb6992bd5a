"""Numeric CSV reading and writing, and deterministic JSON reports."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .core import DataMatrix, InvalidInputError

REPORT_SCHEMA = "sdshuffle.report/1"


class CsvParseError(ValueError):
    pass


def read_csv(path: str | Path) -> DataMatrix:
    """Read a header-first numeric CSV. Cells must be finite decimal numbers."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    while rows and not any(cell.strip() for cell in rows[-1]):
        rows.pop()
    if not rows:
        raise CsvParseError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    values = np.empty((len(rows) - 1, len(header)))
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise CsvParseError(f"{path}: row {i} has {len(row)} cells, header has {len(header)}")
        for j, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise CsvParseError(f"{path}: row {i}, column {header[j]!r}: not a number: {cell!r}") from None
            if not math.isfinite(v):
                raise CsvParseError(f"{path}: row {i}, column {header[j]!r}: non-finite value {cell!r}")
            values[i - 2, j] = v
    try:
        return DataMatrix(values, tuple(header))
    except InvalidInputError as exc:
        raise CsvParseError(f"{path}: {exc}") from None


def write_csv(data: DataMatrix, path: str | Path) -> None:
    """Write with the shortest decimal repr of each double, so reading back is exact."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(data.column_names)
        for row in data.values.tolist():
            w.writerow([repr(v) for v in row])


def write_json(doc: dict, path: str | Path) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True, allow_nan=False)
    Path(path).write_text(text + "\n")
