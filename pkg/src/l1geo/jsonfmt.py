"""Deterministic JSON emission for the package's file formats.

Floats are written with 17 significant digits so every double round-trips
bit-exactly; stdlib json handles parsing.
"""
from __future__ import annotations

import json
import math

import numpy as np

SCHEMA = "l1geo/1"


def _emit(obj) -> str:
    if isinstance(obj, np.ndarray):
        return _emit(obj.tolist())
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if not math.isfinite(f):
            raise ValueError("non-finite float in JSON payload")
        return format(f, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if obj is None:
        return "null"
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}: {_emit(v)}" for k, v in obj.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_emit(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """Serialize to a single-line JSON string with 17-digit floats."""
    return _emit(obj)
