"""Compiled elimination kernels over GF(2^e).

Matrices are uint8 arrays; ``mul`` is the q x q multiplication table and
``inv`` the inverse table of the field.  Addition is XOR.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def row_reduce(A, mul, inv, npiv, full):
    """Gaussian elimination in place.

    Pivots are searched only in the first ``npiv`` columns; row operations
    span the whole row.  With ``full`` the result is in reduced row echelon
    form (pivots normalised to 1, cleared above and below), otherwise only
    below.  Returns (rank, pivot columns, multiply-add count).
    """
    rows, cols = A.shape
    pivots = np.full(min(rows, npiv), -1, dtype=np.int64)
    ops = 0
    r = 0
    for c in range(npiv):
        if r == rows:
            break
        p = -1
        for i in range(r, rows):
            if A[i, c] != 0:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for j in range(cols):
                tmp = A[r, j]
                A[r, j] = A[p, j]
                A[p, j] = tmp
        if full:
            s = inv[A[r, c]]
            if s != 1:
                for j in range(c, cols):
                    A[r, j] = mul[s, A[r, j]]
                ops += cols - c
        start = 0 if full else r + 1
        for i in range(start, rows):
            if i == r:
                continue
            f = A[i, c]
            if f == 0:
                continue
            if not full:
                f = mul[f, inv[A[r, c]]]
            for j in range(c, cols):
                A[i, j] ^= mul[f, A[r, j]]
            ops += cols - c
        pivots[r] = c
        r += 1
    return r, pivots, ops


@njit(cache=True)
def matmul(A, B, mul):
    n, k = A.shape
    m = B.shape[1]
    C = np.zeros((n, m), dtype=np.uint8)
    for i in range(n):
        for t in range(k):
            a = A[i, t]
            if a == 0:
                continue
            for j in range(m):
                C[i, j] ^= mul[a, B[t, j]]
    return C


@njit(cache=True)
def independent_columns(A, mul, inv, limit):
    """Indices of a greedy maximal independent subset of the columns of A.

    Columns are scanned left to right and kept when they increase the rank.
    Scanning stops once ``limit`` columns are kept.
    """
    m, n = A.shape
    basis = np.zeros((m, m), dtype=np.uint8)
    bpiv = np.zeros(m, dtype=np.int64)
    keep = np.empty(min(m, n), dtype=np.int64)
    v = np.empty(m, dtype=np.uint8)
    nb = 0
    for c in range(n):
        if nb == limit or nb == m:
            break
        for i in range(m):
            v[i] = A[i, c]
        for b in range(nb):
            f = v[bpiv[b]]
            if f != 0:
                for i in range(m):
                    v[i] ^= mul[f, basis[b, i]]
        p = -1
        for i in range(m):
            if v[i] != 0:
                p = i
                break
        if p < 0:
            continue
        s = inv[v[p]]
        for i in range(m):
            basis[nb, i] = mul[s, v[i]]
        bpiv[nb] = p
        keep[nb] = c
        nb += 1
    return keep[:nb]
