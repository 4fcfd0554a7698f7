"""CSV reading against the simulator's documented column schemas."""

from __future__ import annotations

import csv
import sys

import numpy as np


class SchemaError(ValueError):
    """Input CSV does not match the expected schema; names what is missing."""


def read_table(path, required=()):
    """Load a CSV into a dict of float columns (non-numeric kept as strings).

    Raises SchemaError naming every missing required column, or if the file
    has no data rows.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, no header")
        rows = [r for r in reader if r]
    missing = [c for c in required if c not in header]
    if missing:
        raise SchemaError(f"{path}: missing required column(s): {', '.join(missing)}")
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    cols = {}
    for k, name in enumerate(header):
        raw = [r[k] for r in rows]
        try:
            cols[name] = np.array([float(x) for x in raw])
        except ValueError:
            cols[name] = np.array(raw)
    return cols


def run(build):
    """Shared entry point: run the figure builder, map schema errors to a
    nonzero exit with the offending column named on stderr."""
    try:
        build()
        return 0
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"missing input: {exc}", file=sys.stderr)
        return 1
