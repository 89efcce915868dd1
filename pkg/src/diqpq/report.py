"""Deterministic JSON / CSV rendering with fixed 9-decimal floats."""

from __future__ import annotations

import csv
import io
import json
import math
import re

_MARK = "__fixed9__:"
_MARK_RE = re.compile('"' + re.escape(_MARK) + r'([^"]*)"')


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot render non-finite value {x!r}")
    # tiny tail parameters (1e-6, 1e-10) would collapse to zero at 9 decimals
    if x != 0.0 and abs(x) < 1e-4:
        return repr(float(x))
    return f"{x:.9f}"


def _mark(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return _MARK + format_float(obj)
    if isinstance(obj, dict):
        return {k: _mark(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_mark(v) for v in obj]
    # numpy scalars
    if hasattr(obj, "item"):
        return _mark(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=None) -> str:
    separators = (",", ":") if indent is None else (",", ": ")
    text = json.dumps(_mark(obj), indent=indent, separators=separators)
    return _MARK_RE.sub(r"\1", text)


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def rows_as_records(header, rows) -> list:
    return [dict(zip(header, row)) for row in rows]
