"""Deterministic CSV/JSON writers shared by the trajectory and scan drivers.

CSV layout: `#`-prefixed metadata lines (key=value, sorted), one header row,
then data rows.  All numbers carry 12 significant digits so regression diffs
are meaningful; identical inputs produce byte-identical files.
"""

import json

from trimersense.errors import ValidationError


def fmt(x):
    """12-significant-digit rendering used for all numeric output."""
    return f"{float(x):.11e}"


def write_csv(path, columns, rows, metadata=None):
    lines = []
    for key in sorted(metadata or {}):
        lines.append(f"# {key}={metadata[key]}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(fmt(x) for x in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_json(path, columns, rows, metadata=None):
    payload = {
        "metadata": {k: str(v) for k, v in sorted((metadata or {}).items())},
        "columns": list(columns),
        "rows": [[float(fmt(x)) for x in row] for row in rows],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_csv(path):
    """Inverse of write_csv: returns (columns, rows, metadata)."""
    metadata = {}
    columns = None
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, val = body.split("=", 1)
                    metadata[key.strip()] = val.strip()
                continue
            if columns is None:
                columns = line.split(",")
                continue
            rows.append([float(x) for x in line.split(",")])
    if columns is None:
        raise ValidationError(f"{path}: no header row found")
    return columns, rows, metadata
