"""Pure-Python GF(2) elimination backend.

Rows are turned into big-integer bitsets; Python's arbitrary-precision XOR
does the word-level work.  Semantics are bit-for-bit identical to the
compiled backend in ``_gf2_cy``.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def rref(words: np.ndarray, ncols: int):
    """In-place reduced row echelon form of a packed bit matrix.

    ``words`` is a (rows, nwords) uint64 array, bit j of a row living in
    word j >> 6.  Returns (rank, pivot column list).  Pivoting picks the
    first row with a nonzero entry in the current column.
    """
    nrows, nwords = words.shape
    rows = [int.from_bytes(words[r].tobytes(), "little") for r in range(nrows)]
    pivots: list[int] = []
    pr = 0
    for col in range(ncols):
        mask = 1 << col
        pivot = -1
        for r in range(pr, nrows):
            if rows[r] & mask:
                pivot = r
                break
        if pivot < 0:
            continue
        if pivot != pr:
            rows[pr], rows[pivot] = rows[pivot], rows[pr]
        prow = rows[pr]
        for r in range(nrows):
            if r != pr and rows[r] & mask:
                rows[r] ^= prow
        pivots.append(col)
        pr += 1
        if pr == nrows:
            break
    nbytes = nwords * 8
    for r in range(nrows):
        words[r] = np.frombuffer(rows[r].to_bytes(nbytes, "little"), dtype=np.uint64)
    return pr, pivots
