"""Flat binary dumps of design matrices and weight tensors.

Each array is stored as::

    uint64 ndim
    uint64 dims[ndim]
    float64 data[prod(dims)]   # row-major

all little-endian. A scene dump is the design matrix followed by ``Psi``.
"""

from __future__ import annotations

import numpy as np

__all__ = ["write_arrays", "read_arrays", "write_scene_dump", "read_scene_dump"]


def write_arrays(path, *arrays) -> None:
    with open(path, "wb") as fh:
        for a in arrays:
            a = np.ascontiguousarray(a, dtype="<f8")
            np.array([a.ndim, *a.shape], dtype="<u8").tofile(fh)
            a.tofile(fh)


def read_arrays(path) -> list:
    raw = open(path, "rb").read()
    out, pos = [], 0
    while pos < len(raw):
        ndim = int(np.frombuffer(raw, "<u8", 1, pos)[0])
        pos += 8
        shape = tuple(int(s) for s in np.frombuffer(raw, "<u8", ndim, pos))
        pos += 8 * ndim
        count = int(np.prod(shape))
        out.append(np.frombuffer(raw, "<f8", count, pos).reshape(shape).copy())
        pos += 8 * count
    return out


def write_scene_dump(path, X_lsa, Psi) -> None:
    write_arrays(path, X_lsa, Psi)


def read_scene_dump(path):
    X, Psi = read_arrays(path)
    return X, Psi
