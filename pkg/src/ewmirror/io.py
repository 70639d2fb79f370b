"""CSV and JSON readers/writers.

CSV files have one header row and floats in shortest round-trip form, so
``read_csv(write_csv(x))`` reproduces ``x`` bit for bit.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np


def _fmt(x):
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return repr(float(x))


def write_csv(path, columns: dict):
    """Write equal-length columns, one per key, to ``path``."""
    path = Path(path)
    names = list(columns)
    data = [np.asarray(columns[k]).ravel() for k in names]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in zip(*data):
            w.writerow([_fmt(x) for x in row])
    return path


def read_csv(path) -> dict:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    arr = np.array([[float(x) for x in r] for r in body]).reshape(len(body), len(header))
    return {name: arr[:, i] for i, name in enumerate(header)}


def write_histogram_csv(path, hist):
    """Matrix layout: first row v-bin centers, first column z-bin centers, cells dimensionless density."""
    path = Path(path)
    density = hist.density()
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["z\\v"] + [_fmt(v) for v in hist.v_centers])
        for z, row in zip(hist.z_centers, density):
            w.writerow([_fmt(z)] + [_fmt(x) for x in row])
    return path


def read_histogram_csv(path):
    """Returns ``(z_centers, v_centers, density)``."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    v = np.array([float(x) for x in rows[0][1:]])
    body = np.array([[float(x) for x in r] for r in rows[1:]])
    return body[:, 0], v, body[:, 1:]


def _default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def write_json(path, obj):
    path = Path(path)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_default) + "\n")
    return path


def read_json(path):
    return json.loads(Path(path).read_text())
