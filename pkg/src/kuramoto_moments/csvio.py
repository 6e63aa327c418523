"""CSV writing with round-trip float formatting (17 significant digits)."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def read_csv(path):
    """Rows as dicts of strings; numeric parsing is left to the caller."""
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))


def order_parameter_rows(times, Z, extra=()):
    for t, z, *rest in zip(times, Z, *extra):
        yield (t, z.real, z.imag, abs(z), *rest)


def moment_columns(pairs):
    cols = []
    for m, k in pairs:
        cols += [f"re_Z{m}_{k}", f"im_Z{m}_{k}"]
    return cols
