"""Flat output records and their CSV / JSON-lines / pretty renderings.

A record is a plain ``dict`` of str keys to ``None``, bool, int, float or
str. Machine formats round-trip exactly: ``parse(render(rs, f), f) == rs``
as long as every record in ``rs`` has the same keys and no float is NaN.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re

__all__ = ["FORMATS", "parse", "quantize", "render", "uniform"]

FORMATS = ("csv", "json-lines", "pretty")

_INT = re.compile(r"[+-]?\d+")


def quantize(value, digits: int):
    """Round floats to ``digits`` significant figures; pass others through."""
    if isinstance(value, float) and math.isfinite(value) and digits > 0:
        return float(f"{value:.{digits}g}")
    return value


def uniform(records: list[dict]) -> list[dict]:
    """Give every record the union of keys, in first-seen order."""
    keys: dict[str, None] = {}
    for r in records:
        keys.update(dict.fromkeys(r))
    return [{k: r.get(k) for k in keys} for r in records]


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv_value(cell: str):
    if cell == "":
        return None
    if cell in ("true", "false"):
        return cell == "true"
    if _INT.fullmatch(cell):
        return int(cell)
    try:
        return float(cell)
    except ValueError:
        return cell


def _pretty_cell(value, digits: int) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.{digits}g}" if digits > 0 else repr(value)
    return str(value)


def render(records: list[dict], fmt: str, digits: int = 9) -> str:
    if fmt == "json-lines":
        return "".join(json.dumps(r) + "\n" for r in records)
    if fmt == "csv":
        if not records:
            return ""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        keys = list(records[0])
        writer.writerow(keys)
        for r in records:
            writer.writerow([_csv_cell(r.get(k)) for k in keys])
        return buf.getvalue()
    if fmt == "pretty":
        if not records:
            return ""
        keys = list(uniform(records)[0])
        rows = [keys] + [[_pretty_cell(r.get(k), digits) for k in keys] for r in records]
        widths = [max(len(row[i]) for row in rows) for i in range(len(keys))]
        lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def parse(text: str, fmt: str) -> list[dict]:
    if fmt == "json-lines":
        return [json.loads(line) for line in text.splitlines() if line.strip()]
    if fmt == "csv":
        reader = csv.reader(io.StringIO(text))
        rows = list(reader)
        if not rows:
            return []
        keys = rows[0]
        return [{k: _csv_value(c) for k, c in zip(keys, row)} for row in rows[1:]]
    raise ValueError(f"format {fmt!r} cannot be parsed")
