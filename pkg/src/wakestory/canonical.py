"""Canonical serialization: byte-identical output for identical inputs.

Rules, shared by results.json, results.csv and bundle.json:
  - floats render with up to 6 significant digits, trailing zeros trimmed
  - negative zero normalizes to zero; NaN/Infinity are rejected
  - objects serialize with sorted keys, no insignificant whitespace
  - a single trailing newline terminates every document
"""

from __future__ import annotations

import json
import math
from typing import Any


def format_float(x: float) -> str:
    if isinstance(x, bool):
        raise TypeError("bool is not a float")
    if not math.isfinite(x):
        raise ValueError(f"non-finite float {x!r} cannot be serialized")
    if x == 0.0:
        x = 0.0  # collapse -0.0
    return "%.6g" % x


def round_float(x: float) -> float:
    """The float a canonical document round-trips to."""
    return float(format_float(x))


def canonicalize(obj: Any) -> Any:
    """Copy of obj with every float replaced by its round-trip value."""
    if isinstance(obj, dict):
        return {k: canonicalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonicalize(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return round_float(obj)
    raise TypeError(f"unsupported type {type(obj).__name__}")


def _write(obj: Any, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(",")
            _write(v, out)
        out.append("]")
    elif isinstance(obj, dict):
        out.append("{")
        for i, k in enumerate(sorted(obj)):
            if not isinstance(k, str):
                raise TypeError("object keys must be strings")
            if i:
                out.append(",")
            out.append(json.dumps(k, ensure_ascii=False))
            out.append(":")
            _write(obj[k], out)
        out.append("}")
    else:
        raise TypeError(f"unsupported type {type(obj).__name__}")


def canonical_json(obj: Any) -> str:
    out: list[str] = []
    _write(obj, out)
    out.append("\n")
    return "".join(out)


def canonical_json_bytes(obj: Any) -> bytes:
    return canonical_json(obj).encode("utf-8")
