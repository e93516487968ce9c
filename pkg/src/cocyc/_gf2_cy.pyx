# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled GF(2) elimination backend (word-packed Gaussian elimination)."""

import numpy as np

cimport numpy as cnp

BACKEND_NAME = "compiled"


def rref(cnp.uint64_t[:, ::1] words, Py_ssize_t ncols):
    """In-place reduced row echelon form of a packed bit matrix.

    Same contract as the pure-Python twin: (rows, nwords) uint64 array,
    bit j of a row in word j >> 6; returns (rank, pivot column list).
    """
    cdef Py_ssize_t nrows = words.shape[0]
    cdef Py_ssize_t nwords = words.shape[1]
    cdef Py_ssize_t pr = 0, col, r, k, wi, pivot
    cdef cnp.uint64_t mask, tmp
    pivots = []
    for col in range(ncols):
        wi = col >> 6
        mask = (<cnp.uint64_t> 1) << (col & 63)
        pivot = -1
        for r in range(pr, nrows):
            if words[r, wi] & mask:
                pivot = r
                break
        if pivot < 0:
            continue
        if pivot != pr:
            for k in range(nwords):
                tmp = words[pr, k]
                words[pr, k] = words[pivot, k]
                words[pivot, k] = tmp
        for r in range(nrows):
            if r != pr and (words[r, wi] & mask):
                for k in range(nwords):
                    words[r, k] ^= words[pr, k]
        pivots.append(col)
        pr += 1
        if pr == nrows:
            break
    return pr, pivots
