"""CSV and JSON artifacts.

CSV files use '.' as decimal separator, no thousands separators, a header row,
and end with a newline. Floats are written in shortest round-trip form so
identical inputs give byte-identical files.
"""
from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError


class DataFileError(InputError):
    """A data file could not be parsed; ``line`` is 1-based (header is line 1)."""

    def __init__(self, path, line: int, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}, line {line}: {message}")


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) if not isinstance(v, str) else v for v in row])
    return path


def write_columns(path, columns: dict) -> Path:
    header = list(columns)
    arrays = [np.asarray(columns[k]) for k in header]
    return write_csv(path, header, zip(*arrays))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def write_json(path, data) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n")
    return path


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def read_columns(path, required: Sequence[str]) -> dict:
    """Read numeric columns ``required`` from a headed CSV file.

    Raises :class:`DataFileError` naming the offending line for missing
    columns, short rows and non-numeric values.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataFileError(path, 1, "file is empty") from None
        missing = [c for c in required if c not in header]
        if missing:
            raise DataFileError(path, 1, f"missing column(s) {', '.join(missing)}")
        idx = [header.index(c) for c in required]
        out = {c: [] for c in required}
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise DataFileError(path, lineno, f"expected {len(header)} fields, got {len(row)}")
            for c, i in zip(required, idx):
                try:
                    out[c].append(float(row[i]))
                except ValueError:
                    raise DataFileError(path, lineno, f"column {c!r}: not a number: {row[i]!r}") from None
    return {c: np.asarray(v) for c, v in out.items()}
