"""Arithmetic and dense linear algebra over GF(2^e).

Elements are the integers ``0 .. q-1`` read as polynomials over GF(2);
matrices are 2-D ``numpy.uint8`` arrays.  Multiplication is table driven and
the elimination loops are compiled with numba (see ``_kernels``).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import IntegrityError, NotDecodableError, ParameterError

# One fixed reduction polynomial per degree; degree 8 is the AES polynomial.
DEFAULT_POLYNOMIALS = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0b100011011,
}


def _poly_mod(a: int, b: int) -> int:
    db = b.bit_length()
    while a.bit_length() >= db:
        a ^= b << (a.bit_length() - db)
    return a


def is_irreducible(poly: int) -> bool:
    """Trial division of a GF(2) polynomial (as a bit pattern)."""
    deg = poly.bit_length() - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for f in range(1 << d, 1 << (d + 1)):
            if _poly_mod(poly, f) == 0:
                return False
    return True


def clmul_mod(a: int, b: int, poly: int) -> int:
    """Schoolbook product of a and b reduced modulo ``poly``."""
    e = poly.bit_length() - 1
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> e:
            a ^= poly
    return r


def _mul_table(e: int, poly: int) -> np.ndarray:
    q = 1 << e
    a = np.arange(q, dtype=np.int64)[:, None].repeat(q, axis=1)
    b = np.arange(q, dtype=np.int64)[None, :].repeat(q, axis=0)
    r = np.zeros((q, q), dtype=np.int64)
    for _ in range(e):
        r ^= np.where(b & 1, a, 0)
        b >>= 1
        a <<= 1
        a = np.where(a >> e, a ^ poly, a)
    return r.astype(np.uint8)


class Field:
    """GF(2^e) with a fixed reduction polynomial.

    Use :func:`gf` to obtain instances; they are cached per (e, poly) so that
    the tables are built once per process.
    """

    def __init__(self, e: int, poly: int | None = None):
        if not 1 <= e <= 8:
            raise ParameterError(f"extension degree must be in 1..8, got {e}")
        poly = DEFAULT_POLYNOMIALS[e] if poly is None else poly
        if poly.bit_length() - 1 != e or not is_irreducible(poly):
            raise ParameterError(f"{poly:#b} is not an irreducible polynomial of degree {e}")
        self.e = e
        self.q = 1 << e
        self.poly = poly
        self.mul_table = _mul_table(e, poly)
        self.mul_table.setflags(write=False)
        inv = np.zeros(self.q, dtype=np.uint8)
        rows, cols = np.nonzero(self.mul_table == 1)
        inv[rows] = cols
        inv.setflags(write=False)
        self.inv_table = inv

    def __repr__(self):
        return f"GF(2^{self.e}, poly={self.poly:#x})"

    def __reduce__(self):
        return gf, (self.e, self.poly)

    # scalar ops

    def add(self, a: int, b: int) -> int:
        return a ^ b

    sub = add

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse in GF(q)")
        return int(self.inv_table[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    # matrices

    def random(self, shape, rng: np.random.Generator) -> np.ndarray:
        return rng.integers(0, self.q, size=shape, dtype=np.uint8)

    def asmatrix(self, M) -> np.ndarray:
        A = np.asarray(M)
        if A.ndim != 2:
            raise ParameterError("expected a 2-D matrix")
        if A.size and (A.min() < 0 or A.max() >= self.q):
            raise ParameterError(f"matrix entries must lie in 0..{self.q - 1}")
        return np.ascontiguousarray(A, dtype=np.uint8)

    def matmul(self, A, B) -> np.ndarray:
        A = self.asmatrix(A)
        B = self.asmatrix(B)
        if A.shape[1] != B.shape[0]:
            raise ParameterError(f"shape mismatch {A.shape} x {B.shape}")
        return _kernels.matmul(A, B, self.mul_table)

    def rank(self, M, *, counter: list | None = None) -> int:
        A = self.asmatrix(M).copy()
        if A.size == 0:
            return 0
        r, _, ops = _kernels.row_reduce(A, self.mul_table, self.inv_table, A.shape[1], False)
        if counter is not None:
            counter[0] += ops
        return int(r)

    def rref(self, M) -> tuple[np.ndarray, list[int]]:
        """Reduced row echelon form and its pivot columns."""
        A = self.asmatrix(M).copy()
        if A.size == 0:
            return A, []
        r, piv, _ = _kernels.row_reduce(A, self.mul_table, self.inv_table, A.shape[1], True)
        return A, [int(c) for c in piv[:r]]

    def independent_columns(self, M, limit: int | None = None) -> np.ndarray:
        """Indices of the columns kept by a left-to-right greedy rank scan."""
        A = self.asmatrix(M)
        if A.shape[1] == 0 or A.shape[0] == 0:
            return np.zeros(0, dtype=np.int64)
        limit = A.shape[0] if limit is None else limit
        return _kernels.independent_columns(A, self.mul_table, self.inv_table, limit)

    def solve_full_rank(self, A, Y, *, counter: list | None = None) -> np.ndarray:
        """Return B with ``B @ A == Y`` where A (m x r) has full row rank m.

        Raises NotDecodableError when rank(A) < m and IntegrityError when the
        columns of Y beyond a basis of A disagree with the solution.
        """
        A = self.asmatrix(A)
        Y = self.asmatrix(Y)
        m, r = A.shape
        if Y.shape[1] != r:
            raise ParameterError(f"Y has {Y.shape[1]} columns, A has {r}")
        if r < m:
            raise NotDecodableError(f"{r} columns cannot span F_q^{m}")
        M = np.concatenate([A.T, Y.T], axis=1)
        rank, _, ops = _kernels.row_reduce(M, self.mul_table, self.inv_table, m, True)
        if counter is not None:
            counter[0] += ops
        if rank < m:
            raise NotDecodableError(f"coefficient matrix has rank {rank} < {m}")
        if M[m:, m:].any():
            raise IntegrityError("payloads are inconsistent with coefficient vectors")
        return np.ascontiguousarray(M[:m, m:].T)

    def column_space_signature(self, M) -> tuple[int, int, bytes]:
        """Canonical label of the column space of M (column RREF)."""
        A = self.asmatrix(M)
        R, piv = self.rref(A.T)
        r = len(piv)
        return A.shape[0], r, R[:r].tobytes()


def gf(e: int, poly: int | None = None) -> Field:
    """Cached field instance for GF(2^e)."""
    return _cached_field(e, DEFAULT_POLYNOMIALS.get(e) if poly is None else poly)


@lru_cache(maxsize=None)
def _cached_field(e, poly):
    return Field(e, poly)


def field_for_size(q: int) -> Field:
    if q < 2 or q & (q - 1):
        raise ParameterError(f"field size must be a power of two, got {q}")
    return gf(q.bit_length() - 1)
