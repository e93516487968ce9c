"""Exact linear algebra over the two-element field.

Matrices carry bit-packed rows (64 columns per machine word), so a row
elimination step is a handful of word-wide XORs.  The elimination kernel has
two interchangeable backends: a compiled Cython core and a pure-Python
fallback that works on big-integer bitsets.  The compiled core is selected
automatically at import time; set ``COCYC_GF2_BACKEND=python`` (or
``compiled``) to force a choice, e.g. for benchmarking.
"""

from __future__ import annotations

import os
from typing import Iterable, Optional, Sequence

import numpy as np

from cocyc import _gf2_py

_FORCED = os.environ.get("COCYC_GF2_BACKEND", "").strip().lower()
if _FORCED == "python":
    _backend = _gf2_py
elif _FORCED == "compiled":
    from cocyc import _gf2_cy as _backend  # type: ignore[no-redef]
else:
    try:
        from cocyc import _gf2_cy as _backend  # type: ignore[no-redef]
    except ImportError:
        _backend = _gf2_py

BACKEND = getattr(_backend, "BACKEND_NAME", "python")


def _nwords(cols: int) -> int:
    return max(1, (cols + 63) >> 6)


class Gf2Vector:
    """A bit vector; addition is XOR, so v + v = 0."""

    __slots__ = ("n", "words")

    def __init__(self, n: int, words: Optional[np.ndarray] = None):
        self.n = int(n)
        if words is None:
            words = np.zeros(_nwords(self.n), dtype=np.uint64)
        self.words = words

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int]) -> "Gf2Vector":
        v = cls(n)
        for i in indices:
            if not 0 <= i < n:
                raise IndexError(f"index {i} out of range for length {n}")
            v.words[i >> 6] ^= np.uint64(1 << (i & 63))
        return v

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "Gf2Vector":
        return cls.from_indices(len(bits), [i for i, b in enumerate(bits) if b & 1])

    def get(self, i: int) -> int:
        return int(self.words[i >> 6] >> np.uint64(i & 63)) & 1

    def support(self) -> list[int]:
        return [i for i in range(self.n) if self.get(i)]

    def is_zero(self) -> bool:
        return not self.words.any()

    def __xor__(self, other: "Gf2Vector") -> "Gf2Vector":
        if self.n != other.n:
            raise ValueError("length mismatch")
        return Gf2Vector(self.n, self.words ^ other.words)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Gf2Vector)
            and self.n == other.n
            and bool(np.array_equal(self.words, other.words))
        )

    def __hash__(self):
        return hash((self.n, self.words.tobytes()))

    def __repr__(self):
        return f"Gf2Vector({self.n}, support={self.support()})"


class Gf2Matrix:
    """Dense bit matrix; rows are packed little-endian into uint64 words.

    Treat instances as immutable: all operations return fresh objects.
    """

    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows: int, cols: int, words: Optional[np.ndarray] = None):
        self.rows = int(rows)
        self.cols = int(cols)
        if words is None:
            words = np.zeros((self.rows, _nwords(self.cols)), dtype=np.uint64)
        self.words = words

    @classmethod
    def from_rows(cls, data: Sequence[Sequence[int]], cols: Optional[int] = None) -> "Gf2Matrix":
        nrows = len(data)
        if cols is None:
            cols = len(data[0]) if nrows else 0
        m = cls(nrows, cols)
        for r, row in enumerate(data):
            for c, bit in enumerate(row):
                if bit & 1:
                    m.words[r, c >> 6] ^= np.uint64(1 << (c & 63))
        return m

    @classmethod
    def identity(cls, n: int) -> "Gf2Matrix":
        m = cls(n, n)
        for i in range(n):
            m.words[i, i >> 6] = np.uint64(1 << (i & 63))
        return m

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Gf2Matrix":
        return cls(rows, cols)

    def get(self, r: int, c: int) -> int:
        return int(self.words[r, c >> 6] >> np.uint64(c & 63)) & 1

    def set_entry(self, r: int, c: int, bit: int) -> None:
        """Set one entry; construction-time use only."""
        mask = np.uint64(1 << (c & 63))
        if bit & 1:
            self.words[r, c >> 6] |= mask
        else:
            self.words[r, c >> 6] &= ~mask

    def row(self, r: int) -> Gf2Vector:
        return Gf2Vector(self.cols, self.words[r].copy())

    def column(self, c: int) -> Gf2Vector:
        return Gf2Vector.from_indices(self.rows, [r for r in range(self.rows) if self.get(r, c)])

    def transpose(self) -> "Gf2Matrix":
        t = Gf2Matrix(self.cols, self.rows)
        for r in range(self.rows):
            w = self.words[r]
            for c in range(self.cols):
                if (int(w[c >> 6]) >> (c & 63)) & 1:
                    t.words[c, r >> 6] ^= np.uint64(1 << (r & 63))
        return t

    def matvec(self, x: Gf2Vector) -> Gf2Vector:
        """Matrix-vector product over GF(2)."""
        if x.n != self.cols:
            raise ValueError("dimension mismatch")
        out = Gf2Vector(self.rows)
        for r in range(self.rows):
            acc = np.bitwise_and(self.words[r], x.words)
            parity = bin(int(np.bitwise_xor.reduce(acc))).count("1") & 1
            if parity:
                out.words[r >> 6] ^= np.uint64(1 << (r & 63))
        return out

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for r in range(self.rows):
            for c in range(self.cols):
                out[r, c] = self.get(r, c)
        return out

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Gf2Matrix)
            and (self.rows, self.cols) == (other.rows, other.cols)
            and bool(np.array_equal(self.words, other.words))
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.words.tobytes()))

    def __repr__(self):
        return f"Gf2Matrix({self.rows}x{self.cols})"


def rank(m: Gf2Matrix) -> int:
    """GF(2) rank via Gaussian elimination (first-nonzero pivoting)."""
    if m.rows == 0 or m.cols == 0:
        return 0
    work = np.ascontiguousarray(m.words.copy())
    r, _ = _backend.rref(work, m.cols)
    return r


def solve(m: Gf2Matrix, b: Gf2Vector) -> Optional[Gf2Vector]:
    """One solution x of m @ x = b over GF(2), or None if unsolvable.

    Free variables are set to zero, so the answer is deterministic even when
    the solution set is a coset.
    """
    if b.n != m.rows:
        raise ValueError(f"rhs length {b.n} != row count {m.rows}")
    ncols = m.cols
    aug_cols = ncols + 1
    aug = np.zeros((m.rows, _nwords(aug_cols)), dtype=np.uint64)
    aug[:, : m.words.shape[1]] = m.words
    bcol = ncols
    for r in range(m.rows):
        if b.get(r):
            aug[r, bcol >> 6] ^= np.uint64(1 << (bcol & 63))
    _, pivots = _backend.rref(aug, aug_cols)
    if pivots and pivots[-1] == ncols:
        return None
    x = Gf2Vector(ncols)
    for i, c in enumerate(pivots):
        if (int(aug[i, bcol >> 6]) >> (bcol & 63)) & 1:
            x.words[c >> 6] ^= np.uint64(1 << (c & 63))
    return x


def in_column_span(m: Gf2Matrix, b: Gf2Vector) -> bool:
    """True iff b lies in the column space of m."""
    return solve(m, b) is not None


def hstack(left: Gf2Matrix, right: Gf2Matrix) -> Gf2Matrix:
    """Concatenate two matrices with equal row counts column-wise."""
    if left.rows != right.rows:
        raise ValueError("row count mismatch")
    out = Gf2Matrix(left.rows, left.cols + right.cols)
    out.words[:, : left.words.shape[1]] = left.words
    for r in range(right.rows):
        for c in range(right.cols):
            if right.get(r, c):
                cc = left.cols + c
                out.words[r, cc >> 6] ^= np.uint64(1 << (cc & 63))
    return out
