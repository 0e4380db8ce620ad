"""Machine-readable reports: JSON and CSV emission.

Field ordering is fixed, floats carry 17 significant digits, extended
scalars serialize as {mantissa, exponent}.  The timestamp and per-item
wall-clock fields are excluded from payload_bytes so reruns with one
config compare byte-identical.
"""
from __future__ import annotations

import json
from typing import Any, Dict

from .extscalar import ExtScalar
from .suites import RunRecord


def _normalize(value: Any) -> Any:
    if isinstance(value, ExtScalar):
        m, e = value.parts()
        return {"mantissa": m, "exponent": e}
    if isinstance(value, float):
        return float(format(value, ".17g"))
    if isinstance(value, dict):
        return {str(k): _normalize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_normalize(v) for v in value]
    return value


def record_payload(record: RunRecord, with_timestamp: bool = False) -> Dict:
    items = record.items
    if not with_timestamp:  # determinism payload: drop wall-clock fields
        items = [{k: v for k, v in item.items() if k != "runtime_ms"}
                 for item in items]
    payload = {
        "suite": record.suite,
        "config_digest": record.config_digest,
        "backend": record.backend,
        "items": [_normalize(item) for item in items],
        "pass": record.tallies.get("pass", 0),
        "fail": record.tallies.get("fail", 0),
        "flag": record.tallies.get("flag", 0),
        "error": record.tallies.get("error", 0),
    }
    if with_timestamp:
        payload["timestamp"] = record.timestamp
    return payload


def payload_bytes(record: RunRecord) -> bytes:
    """Canonical bytes for determinism comparison (timestamp excluded)."""
    return json.dumps(record_payload(record, with_timestamp=False),
                      sort_keys=False, separators=(",", ":")).encode()


def emit_report(record: RunRecord, fmt: str = "json") -> bytes:
    if fmt == "json":
        return json.dumps(record_payload(record, with_timestamp=True),
                          indent=1).encode() + b"\n"
    if fmt == "csv":
        lines = ["key,status,lhs,rhs,ratio,value,note"]
        for item in record.items:
            metrics = item.get("metrics", {})

            def cell(name):
                v = metrics.get(name)
                return format(v, ".17g") if isinstance(v, float) else ""

            value = ""
            for probe in ("value", "best", "worst_rel", "max_rel_err",
                          "rel_err", "worst_far_ratio"):
                v = metrics.get(probe)
                if isinstance(v, (int, float)):
                    value = format(float(v), ".17g")
                    break
            note = str(item.get("note", "")).replace(",", ";")
            lines.append(",".join([item["key"], item["status"], cell("lhs"),
                                   cell("rhs"), cell("ratio"), value, note]))
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown report format {fmt!r}")
