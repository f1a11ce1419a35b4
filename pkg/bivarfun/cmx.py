"""
Reader and writer of the ``cmx v1`` matrix text format::

    cmx <rows> <cols>
    <re> <im>
    ...

one line per entry in column-major order, 17 significant digits.
"""
from __future__ import annotations

import math
from pathlib import Path
from typing import Union

import numpy as np

from .errors import ArgumentError

PathLike = Union[str, Path]


def dumps(X) -> str:
    X = np.atleast_2d(np.asarray(X, dtype=complex))
    rows, cols = X.shape
    lines = [f"cmx {rows} {cols}"]
    lines += [f"{z.real:.17g} {z.imag:.17g}" for z in X.ravel(order='F')]
    return '\n'.join(lines) + '\n'


def loads(text: str) -> np.ndarray:
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise ArgumentError("empty cmx input")
    header = lines[0].split()
    if len(header) != 3 or header[0] != 'cmx':
        raise ArgumentError(f"bad cmx header {lines[0]!r}")
    try:
        rows, cols = int(header[1]), int(header[2])
    except ValueError:
        raise ArgumentError(f"bad cmx header {lines[0]!r}")
    if rows < 0 or cols < 0:
        raise ArgumentError(f"negative cmx dimensions {rows}x{cols}")
    body = lines[1:]
    if len(body) != rows * cols:
        raise ArgumentError(f"cmx header announces {rows * cols} entries, found {len(body)}")
    data = np.empty(rows * cols, dtype=complex)
    for k, line in enumerate(body):
        parts = line.split()
        if len(parts) != 2:
            raise ArgumentError(f"bad cmx entry {line!r}")
        try:
            re, im = float(parts[0]), float(parts[1])
        except ValueError:
            raise ArgumentError(f"bad cmx entry {line!r}")
        if not (math.isfinite(re) and math.isfinite(im)):
            raise ArgumentError(f"non-finite cmx entry {line!r}")
        data[k] = complex(re, im)
    return data.reshape((rows, cols), order='F')


def read_cmx(path: PathLike) -> np.ndarray:
    return loads(Path(path).read_text())


def write_cmx(path: PathLike, X):
    Path(path).write_text(dumps(X))
