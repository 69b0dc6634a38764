"""Deterministic JSON and CSV writers.

Floats are written with 17 significant digits in CSV and with Python's
round-trip ``repr`` in JSON, so repeated runs produce byte-identical files.
Non-finite numbers become ``null`` in JSON.
"""
import csv
import json
import math

import numpy as np

INVARIANT_COLUMNS = ("u", "v", "f", "a", "b", "c", "d", "beta1", "beta2", "K", "kappa")


def plain(obj):
    """Convert numpy containers and scalars into JSON-ready Python objects."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps(obj):
    return json.dumps(plain(obj), indent=2, allow_nan=False) + "\n"


def write_json(path, obj):
    with open(path, "w") as fh:
        fh.write(dumps(obj))


def fmt(x):
    if isinstance(x, str):
        return x
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    return f"{float(x):.17g}"


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) for x in row])


def invariant_rows(frame):
    """Rows of the frame invariant grid; ``f`` is ftilde for (s, t) charts."""
    f = frame.f if frame.coords == "uv" else frame.ftilde
    cols = [frame.u, frame.v, f, frame.a, frame.b, frame.c, frame.d,
            frame.beta1, frame.beta2, frame.K, frame.kappa]
    return np.stack([np.ravel(c) for c in cols], axis=1)


def gauss_rows(u, v, G, dG):
    return np.column_stack([np.ravel(u), np.ravel(v), G.reshape(6, -1).T,
                            dG.reshape(6, -1).T])


GAUSS_COLUMNS = ("u", "v") + tuple(f"G{i}" for i in range(1, 7)) + tuple(
    f"dG{i}" for i in range(1, 7))
