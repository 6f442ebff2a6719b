"""JSON encodings for matrices and reports, with deterministic float rounding."""
from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .errors import SchemaError

SCHEMA = "tubestab/1"
SIG_DIGITS = 12


def round_sig(x: float, digits: int = SIG_DIGITS) -> float:
    if not math.isfinite(x) or x == 0:
        return x
    return float(f"{x:.{digits - 1}e}")


def matrix_to_json(M) -> dict:
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    return {
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "re": [float(v) for v in M.real.ravel()],
        "im": [float(v) for v in M.imag.ravel()],
    }


def matrix_from_json(obj: Any) -> np.ndarray:
    try:
        r, c = int(obj["rows"]), int(obj["cols"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", [0.0] * (r * c)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed matrix JSON: {exc}") from exc
    if re.size != r * c or im.size != r * c:
        raise SchemaError(f"matrix JSON has {re.size} entries for a {r}x{c} matrix")
    M = (re + 1j * im).reshape(r, c)
    if not np.all(np.isfinite(M)):
        raise SchemaError("matrix JSON has non-finite entries")
    return M


def vector_to_json(v) -> dict:
    v = np.asarray(v, dtype=complex).ravel()
    return {"re": [float(x) for x in v.real], "im": [float(x) for x in v.imag]}


def vector_from_json(obj: Any) -> np.ndarray:
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", [0.0] * re.size), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed vector JSON: {exc}") from exc
    if re.shape != im.shape:
        raise SchemaError("vector JSON re/im lengths differ")
    return re + 1j * im


EXACT_KEYS = ("re", "im")


def to_plain(obj: Any, digits: int = SIG_DIGITS, exact: bool = False) -> Any:
    """Recursively convert numpy values to JSON types.

    Report floats are rounded to ``digits`` significant digits.  Values under
    "re"/"im" keys are data (matrix entries, coefficients, points) and keep full
    precision so that files written by one command verify under another.
    """
    if isinstance(obj, dict):
        return {str(k): to_plain(v, digits, exact or k in EXACT_KEYS) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v, digits, exact) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist(), digits, exact)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return str(x)
        return x if exact else round_sig(x, digits)
    if isinstance(obj, (complex, np.complexfloating)):
        return to_plain({"re": float(obj.real), "im": float(obj.imag)}, digits, exact)
    if hasattr(obj, "to_json"):
        return to_plain(obj.to_json(), digits, exact)
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(to_plain(obj), sort_keys=True, indent=2)
