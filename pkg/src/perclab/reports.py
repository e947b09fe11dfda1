"""Report envelopes: canonical JSON, input digests, CSV flattening."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, is_dataclass


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      default=_jsonify)


def _jsonify(obj):
    if is_dataclass(obj):
        return asdict(obj)
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    raise TypeError(f"cannot serialize {type(obj)!r}")


def inputs_digest(inputs: dict) -> str:
    return hashlib.sha256(canonical_json(inputs).encode()).hexdigest()[:16]


def sanitize(obj):
    """Make a structure json-dumpable: dataclasses, numpy scalars/arrays,
    non-finite floats (to strings)."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return sanitize(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def render_json(report: dict) -> str:
    return json.dumps(sanitize(report), sort_keys=True, indent=1) + "\n"


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(columns: list[str], rows: list[dict]) -> str:
    lines = [",".join(columns)]
    lines.extend(",".join(_cell(row.get(c)) for c in columns) for row in rows)
    return "\n".join(lines) + "\n"


SWEEP_COLUMNS = ["p", "n", "k", "estimate", "ci_low", "ci_high", "bound", "pass"]


def flatten_result_row(report: dict) -> dict:
    """Canonical one-row CSV view of a check/estimator report."""
    row = {}
    for key in ("p", "n", "k"):
        row[key] = report.get(key)
    est = report.get("estimate")
    if isinstance(est, dict):
        row["estimate"] = est.get("mean")
        row["ci_low"] = est.get("ci_low")
        row["ci_high"] = est.get("ci_high")
    row["bound"] = report.get("bound")
    row["pass"] = report.get("pass")
    return row
