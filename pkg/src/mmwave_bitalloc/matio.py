"""Plain-text export/import of complex matrices for cross-checking in other tools.

Format: a single header line ``cmatrix <rows> <cols>`` followed by one line per
row, each holding ``2*cols`` whitespace-separated floats (re im re im ...),
row-major.
"""

from __future__ import annotations

import numpy as np

_HEADER = "cmatrix"


def save_complex_matrix(path, matrix: np.ndarray) -> None:
    m = np.atleast_2d(np.asarray(matrix, dtype=complex))
    rows, cols = m.shape
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{_HEADER} {rows} {cols}\n")
        for r in range(rows):
            parts = []
            for c in range(cols):
                v = m[r, c]
                parts.append(f"{v.real:.17g} {v.imag:.17g}")
            fh.write(" ".join(parts) + "\n")


def load_complex_matrix(path) -> np.ndarray:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 3 or header[0] != _HEADER:
            raise ValueError(f"{path}: not a cmatrix file")
        rows, cols = int(header[1]), int(header[2])
        out = np.empty((rows, cols), dtype=complex)
        for r in range(rows):
            vals = [float(t) for t in fh.readline().split()]
            if len(vals) != 2 * cols:
                raise ValueError(f"{path}: row {r} has {len(vals)} values, expected {2 * cols}")
            out[r] = np.asarray(vals[0::2]) + 1j * np.asarray(vals[1::2])
    return out
