"""Trace serialization: newline-delimited JSON, canonical key order.

Records carry only simulation-time content; wall-clock run metadata
belongs in a sidecar so trace bytes stay reproducible.
"""

from __future__ import annotations

import json
from pathlib import Path


def dumps(records: list[dict]) -> str:
    return "".join(
        json.dumps(rec, sort_keys=True, separators=(",", ":")) + "\n"
        for rec in records
    )


def write_ndjson(records: list[dict], path: str | Path) -> None:
    Path(path).write_text(dumps(records))


def read_ndjson(path: str | Path) -> list[dict]:
    out = []
    for line in Path(path).read_text().splitlines():
        if line:
            out.append(json.loads(line))
    return out
