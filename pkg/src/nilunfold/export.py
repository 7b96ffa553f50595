"""CSV and JSON output with a fixed, reproducible number format."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def format_value(v) -> str:
    """Floats with 17 significant digits, booleans as ``true``/``false``."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, Fraction):
        v = float(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.17g}"
    return str(v)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return int(v)
    if isinstance(v, (float, np.floating, Fraction)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    return str(v) if not isinstance(v, (str, type(None))) else v


def json_text(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def table_json(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    """Rows as a list of objects keyed by column."""
    return json_text([dict(zip(header, row)) for row in rows])


def table_text(header: Sequence[str], rows: Iterable[Sequence], fmt: str) -> str:
    if fmt == "csv":
        return csv_text(header, rows)
    if fmt == "json":
        return table_json(header, rows)
    raise ValueError(f"unknown format {fmt!r}")


def write_text(text: str, path: str | None) -> None:
    """Write to ``path``, or stdout when ``path`` is ``None`` or ``-``."""
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def matrix_to_json(a) -> list:
    """Rationals as ``"num/den"`` strings, floats as numbers."""
    out = []
    for row in np.asarray(a):
        cells = []
        for x in row:
            if isinstance(x, Fraction):
                cells.append(f"{x.numerator}/{x.denominator}")
            elif isinstance(x, int):
                cells.append(f"{x}/1")
            else:
                cells.append(float(x))
        out.append(cells)
    return out


def matrix_from_json(data: Sequence[Sequence]) -> np.ndarray:
    if all(isinstance(x, str) for row in data for x in row):
        out = np.empty((len(data), len(data[0])), dtype=object)
        for i, row in enumerate(data):
            for j, x in enumerate(row):
                out[i, j] = Fraction(x)
        return out
    return np.array(data, dtype=float)
