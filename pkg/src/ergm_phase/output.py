"""Byte-stable CSV and JSON serialization of result tables."""

from __future__ import annotations

import enum
import json
import math
from typing import Any, Iterable, Mapping, Sequence

import numpy as np


def _plain(value: Any) -> Any:
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"refusing to serialize non-finite value {value}")
        return value
    if isinstance(value, Mapping):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def _cell(value: Any) -> str:
    value = _plain(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return ";".join(_cell(v) for v in value)
    text = str(value)
    if any(ch in text for ch in ',"\n'):
        text = '"' + text.replace('"', '""') + '"'
    return text


def to_csv(rows: Iterable[Mapping[str, Any]], columns: Sequence[str]) -> str:
    lines = [",".join(columns)]
    for row in rows:
        if set(row) != set(columns):
            raise ValueError(f"row keys {sorted(row)} do not match columns {list(columns)}")
        lines.append(",".join(_cell(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


def to_json(payload: Any) -> str:
    return json.dumps(_plain(payload), separators=(",", ":"), allow_nan=False) + "\n"


def emit(rows: Sequence[Mapping[str, Any]], fmt: str, columns: Sequence[str]) -> bytes:
    """Serialize a homogeneous table: CSV with header, or a JSON array of objects."""
    if fmt == "csv":
        return to_csv(rows, columns).encode()
    if fmt == "json":
        return to_json([{c: row[c] for c in columns} for row in rows]).encode()
    raise ValueError(f"unknown format {fmt!r}")
