"""Deterministic JSON/CSV report emission.

Reports echo the command, digest their inputs, carry the result payload and
a list of certificates, and are byte-identical across repeated invocations
apart from the timestamp field.
"""

from __future__ import annotations

import csv
import hashlib
import json
from datetime import datetime, timezone
from typing import Iterable, Sequence

TOOL_NAME = "convderiv"
TOOL_VERSION = "0.1.0"

REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["tool", "version", "command", "inputs", "input_digest",
                 "seed", "result", "certificates", "timestamp"],
    "properties": {
        "tool": {"type": "string"},
        "version": {"type": "string"},
        "command": {"type": "array", "items": {"type": "string"}},
        "inputs": {"type": "object"},
        "input_digest": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "seed": {"type": "integer"},
        "result": {"type": "object"},
        "certificates": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "passed", "details"],
                "properties": {
                    "name": {"type": "string"},
                    "passed": {"type": "boolean"},
                    "details": {"type": "object"},
                },
            },
        },
        "timestamp": {"type": "string"},
    },
}


def certificate(name: str, passed: bool, **details) -> dict:
    return {"name": name, "passed": bool(passed), "details": details}


def complex_to_json(z: complex) -> list:
    z = complex(z)
    return [z.real, z.imag]


def complex_seq_to_json(values) -> list:
    return [complex_to_json(z) for z in values]


def complex_matrix_to_json(matrix) -> list:
    return [[complex_to_json(z) for z in row] for row in matrix]


def input_digest(inputs: dict) -> str:
    canonical = json.dumps(inputs, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def build_report(command: Sequence[str], inputs: dict, result: dict,
                 certificates: Sequence[dict], seed: int) -> dict:
    return {
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "command": list(command),
        "inputs": inputs,
        "input_digest": input_digest(inputs),
        "seed": int(seed),
        "result": result,
        "certificates": list(certificates),
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def render_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def write_report(report: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(render_report(report))


def strip_timestamp(rendered: str) -> str:
    """Drop the timestamp line so renderings can be compared bytewise."""
    return "\n".join(line for line in rendered.splitlines()
                     if not line.lstrip().startswith('"timestamp"'))


def write_csv(path: str, header: Sequence[str],
              rows: Iterable[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)
