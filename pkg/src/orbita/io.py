"""Deterministic CSV and JSON writers and their readers.

CSV files carry a header row, LF line endings and 17 significant digits so
that golden files diff cleanly.  JSON files are a single object
``{"meta": {...}, "rows": [...]}``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__

SORT_KEYS = ("L", "k", "t")


def fmt(v) -> str:
    """17 significant digits for floats, plain text otherwise."""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float) or hasattr(v, "dtype"):
        x = float(v)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x + 0.0, ".17g")
    return str(v)


def sort_rows(rows: list, columns: Sequence[str]) -> list:
    """Stable sort by (L, k) then t, using whichever of those keys exist."""
    keys = [k for k in SORT_KEYS if k in columns]
    if not keys:
        return list(rows)
    return sorted(rows, key=lambda r: tuple(r[k] for k in keys))


def csv_text(rows: Iterable[dict], columns: Sequence[str], sort: bool = True) -> str:
    rows = list(rows)
    if sort:
        rows = sort_rows(rows, columns)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r[c]) for c in columns])
    return buf.getvalue()


def write_csv(path, rows, columns, sort: bool = True) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(rows, columns, sort))
    return path


def _num(s: str):
    try:
        if s.lstrip("-").isdigit():
            return int(s)
        return float(s)
    except ValueError:
        return s


def read_csv(path) -> list:
    """Rows as dicts with numeric fields converted back to int or float."""
    with open(path, encoding="utf-8", newline="") as fh:
        return [{k: _num(v) for k, v in r.items()} for r in csv.DictReader(fh)]


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "tolist"):
        return _jsonable(v.tolist())
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def make_meta(orbit, params: dict, tolerances: dict) -> dict:
    return {"orbit": [float(x) for x in orbit], "params": params,
            "version": __version__, "tolerances": tolerances}


def json_text(meta: dict, rows: list, columns: Sequence[str] | None = None, sort: bool = True) -> str:
    if columns is not None and sort:
        rows = sort_rows(rows, columns)
    if columns is not None:
        rows = [{c: r[c] for c in columns} for r in rows]
    return json.dumps(_jsonable({"meta": meta, "rows": rows}), indent=1, sort_keys=False) + "\n"


def write_json(path, meta, rows, columns=None, sort: bool = True) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(json_text(meta, rows, columns, sort))
    return path


def read_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
