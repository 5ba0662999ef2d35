"""CSV hand-off of signal bundles.

The first column is ``t_s``; every other header is ``<signal>_<unit>``.
Floats are written with ``repr`` so reading them back is exact.
"""

from __future__ import annotations

import csv

import numpy as np

from .errors import ConfigError
from .timeseries import SignalBundle


def write_csv(bundle: SignalBundle, path) -> None:
    if not bundle.signals or bundle.n_samples == 0:
        raise ConfigError("refusing to write an empty signal bundle")
    names = list(bundle.signals)
    cols = [bundle.t.tolist()] + [bundle.signals[n].tolist() for n in names]
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t_s"] + [f"{n}_{bundle.units[n]}" for n in names])
        w.writerows(zip(*cols))


def split_header(header: str) -> tuple[str, str]:
    name, _, unit = header.rpartition("_")
    if not name:
        raise ConfigError(f"column header {header!r} lacks a unit suffix")
    return name, unit


def read_csv(path) -> SignalBundle:
    with open(path, newline="", encoding="ascii") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][0] != "t_s":
        raise ConfigError(f"{path}: first column must be t_s")
    header, body = rows[0], rows[1:]
    data = np.array(body, dtype=float).reshape(len(body), len(header))
    t = data[:, 0]
    dt = float(t[1] - t[0]) if len(t) > 1 else 1.0
    bundle = SignalBundle(dt, t0=float(t[0]) if len(t) else 0.0)
    for k, h in enumerate(header[1:], start=1):
        name, unit = split_header(h)
        bundle.add(name, unit, data[:, k])
    return bundle
