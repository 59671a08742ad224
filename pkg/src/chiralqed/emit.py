"""Deterministic file emission: shortest round-trip floats, stable hashing.

Re-running an identical run specification must produce byte-identical
artifacts, so every float is written through ``repr`` (the shortest decimal
that round-trips), infinities as the literals ``inf`` / ``-inf``, and rows
in a fixed order.  No timestamps or absolute paths appear in any output.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path


def fmt(value) -> str:
    """Shortest round-trip decimal for a float; 'inf'/'-inf'/'nan' literals."""
    x = float(value)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return repr(x + 0.0)  # normalizes -0.0


def fmt_int(value) -> str:
    return str(int(value))


def csv_text(header, rows) -> str:
    """Assemble CSV text; cells are pre-formatted strings."""
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    return "\n".join(lines) + "\n"


def matrix_csv_text(matrix) -> str:
    """Row-major matrix CSV with re,im cell pairs (2N columns per row)."""
    rows = []
    for row in matrix:
        cells = []
        for z in row:
            z = complex(z)
            cells.append(fmt(z.real))
            cells.append(fmt(z.imag))
        rows.append(",".join(cells))
    return "\n".join(rows) + "\n"


def write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def canonical_json(obj) -> str:
    """Canonical (sorted, compact) JSON used for configuration hashing."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(document, version: str) -> str:
    """Hash covering everything that affects emitted numbers."""
    return sha256_text(canonical_json({"document": document, "version": version}))
