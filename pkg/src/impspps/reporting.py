"""Deterministic CSV and JSON output and the shapes of the JSON reports.

CSV files are comma separated with a header row and every real number
written as ``%.17e``.  JSON documents use sorted keys; floats are written
with Python's shortest round trip representation, which is exact, and
non-finite values become ``null``.  No output carries a time stamp, so an
identical configuration reproduces byte identical files.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

__all__ = ["write_csv", "write_json", "to_jsonable", "format_number", "SCHEMAS"]


def format_number(v) -> str:
    """Locale independent text for a CSV cell."""
    if isinstance(v, (str, bytes)):
        return v if isinstance(v, str) else v.decode()
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.17e" % (float(v) + 0.0)  # no negative zero


def write_csv(path, header, rows) -> Path:
    """Write ``rows`` (an iterable of sequences, or a 2-D array) under ``header``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(header))
        for row in rows:
            w.writerow([format_number(v) for v in row])
    return path


def to_jsonable(obj):
    """Convert numpy scalars and arrays (recursively) to plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_jsonable(obj.real), to_jsonable(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")
    return path


_NUM = {"type": ["number", "null"]}
_NUMS = {"type": "array", "items": _NUM}

#: JSON schemas of the reports written by the command line tool
SCHEMAS = {
    "formal_powers": {
        "type": "object",
        "required": ["impedance", "K", "x0", "interval", "derivative_relation", "certificate"],
        "properties": {
            "impedance": {"type": "string"},
            "K": {"type": "integer"},
            "x0": _NUM,
            "interval": _NUMS,
            "derivative_relation": {
                "type": "object",
                "required": ["direct", "reciprocal"],
                "properties": {"direct": _NUMS, "reciprocal": _NUMS},
            },
            "certificate": {"type": "object"},
        },
    },
    "solve": {
        "type": "object",
        "required": ["impedance", "solutions", "wronskian"],
        "properties": {
            "impedance": {"type": "string"},
            "solutions": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["kind", "rho", "N", "tail_estimate", "oracle", "oracle_error",
                                 "darboux_error", "file"],
                    "properties": {
                        "kind": {"enum": ["e", "C", "S"]},
                        "rho": _NUMS,
                        "N": {"type": "integer"},
                        "tail_estimate": _NUM,
                        "oracle": {"type": "string"},
                        "oracle_error": _NUM,
                        "darboux_error": _NUM,
                        "file": {"type": "string"},
                    },
                },
            },
            "wronskian": {"type": "array"},
        },
    },
    "eigen": {
        "type": "object",
        "required": ["impedance", "interval", "eigenvalues", "residuals", "orthonormality"],
        "properties": {
            "impedance": {"type": "string"},
            "interval": _NUMS,
            "eigenvalues": _NUMS,
            "residuals": _NUMS,
            "orthonormality": _NUM,
        },
    },
    "approx": {
        "type": "object",
        "required": ["target", "impedance", "N", "errors", "cond", "method", "hypothesis"],
        "properties": {
            "target": {"type": "string"},
            "impedance": {"type": "string"},
            "N": {"type": "array", "items": {"type": "integer"}},
            "errors": {"type": "object", "additionalProperties": _NUMS},
            "cond": _NUMS,
            "method": {"type": "array", "items": {"enum": ["cholesky", "qr"]}},
            "hypothesis": {"enum": ["checked", "unchecked"]},
        },
    },
    "kernel": {
        "type": "object",
        "required": ["impedance", "J", "mode", "ell", "slices", "goursat", "mapping", "l2_norm"],
        "properties": {
            "impedance": {"type": "string"},
            "J": {"type": "integer"},
            "mode": {"enum": ["triangle", "rectangle"]},
            "ell": _NUM,
            "slices": {"type": "integer"},
            "goursat": {"type": "object"},
            "mapping": _NUMS,
            "l2_norm": _NUM,
            "relations": {"type": "object"},
        },
    },
    "check": {
        "type": "object",
        "required": ["impedance", "verdict", "checks"],
        "properties": {
            "impedance": {"type": "string"},
            "verdict": {"enum": ["pass", "fail"]},
            "checks": {
                "type": "object",
                "additionalProperties": {
                    "type": "object",
                    "required": ["module", "value", "tol", "pass"],
                    "properties": {
                        "module": {"type": "string"},
                        "value": _NUM,
                        "tol": _NUM,
                        "pass": {"type": "boolean"},
                    },
                },
            },
        },
    },
}
