"""CSV ingestion and deterministic JSON / CSV output."""
from __future__ import annotations

import csv
import datetime as _dt
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInputError

DATE_COLUMNS = ("date", "Date", "DATE")


@dataclass(frozen=True, eq=False)
class InputSeries:
    column: str
    values: np.ndarray
    dates: tuple | None


def read_series(path, column: str, date_column: str | None = None) -> InputSeries:
    """Read one numeric column from a headed CSV file.

    Rows whose value does not parse as a finite decimal number are rejected
    with an error naming the line; they are never skipped. A date column is
    used when ``date_column`` is given or a column named ``date`` exists and
    must then hold ISO-8601 dates.
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = [h.strip() for h in next(reader)]
            except StopIteration:
                raise InvalidInputError(f"{path}: empty file") from None
            rows = list(reader)
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except UnicodeDecodeError as exc:
        raise InvalidInputError(f"{path}: not UTF-8 text") from exc

    if column not in header:
        raise InvalidInputError(f"{path}: no column {column!r} in header {header}")
    if date_column is None:
        date_column = next((c for c in DATE_COLUMNS if c in header), None)
    elif date_column not in header:
        raise InvalidInputError(f"{path}: no date column {date_column!r}")
    vi = header.index(column)
    di = header.index(date_column) if date_column else None

    values = []
    dates = [] if di is not None else None
    for lineno, row in enumerate(rows, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise InvalidInputError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        raw = row[vi].strip()
        try:
            x = float(raw)
        except ValueError:
            raise InvalidInputError(f"{path}:{lineno}: cannot parse {raw!r} as a number") from None
        if not math.isfinite(x):
            raise InvalidInputError(f"{path}:{lineno}: non-finite value {raw!r}")
        values.append(x)
        if di is not None:
            d = row[di].strip()
            try:
                _dt.date.fromisoformat(d[:10])
            except ValueError:
                raise InvalidInputError(f"{path}:{lineno}: {d!r} is not an ISO-8601 date") from None
            dates.append(d)
    if not values:
        raise InvalidInputError(f"{path}: no data rows")
    return InputSeries(column=column, values=np.array(values), dates=tuple(dates) if dates is not None else None)


def to_jsonable(obj):
    """Convert numpy scalars/arrays and tuples to plain JSON types; NaN/inf become null."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(dumps(obj), encoding="utf-8", newline="\n")
    return path


def read_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_csv(path, columns: dict) -> Path:
    """Write equal-length columns, in the dict's order, as a headed CSV."""
    path = Path(path)
    names = list(columns)
    cols = [list(columns[k]) for k in names]
    lengths = {len(c) for c in cols}
    if len(lengths) > 1:
        raise ValueError(f"column lengths differ: {dict(zip(names, map(len, cols)))}")
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in zip(*cols):
            w.writerow(["" if v is None else repr(float(v)) if isinstance(v, (float, np.floating)) else v
                        for v in row])
    return path
