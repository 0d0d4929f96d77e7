"""Brute-force reference implementations used as test oracles.

Nothing here calls the elimination kernels: vectors are tuples, spans are
enumerated explicitly and field products use plain polynomial arithmetic.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

POLYS = {1: 0b11, 2: 0b111, 3: 0b1011, 4: 0b10011}


def poly_mul_mod(a: int, b: int, poly: int) -> int:
    """Full carry-less product, then long division by poly."""
    prod = 0
    for i in range(b.bit_length()):
        if b >> i & 1:
            prod ^= a << i
    deg = poly.bit_length() - 1
    for s in range(prod.bit_length() - 1, deg - 1, -1):
        if prod >> s & 1:
            prod ^= poly << (s - deg)
    return prod


class SlowField:
    def __init__(self, e: int):
        self.e, self.q, self.poly = e, 1 << e, POLYS[e]

    def mul(self, a, b):
        return poly_mul_mod(int(a), int(b), self.poly)

    def vadd(self, u, v):
        return tuple(x ^ y for x, y in zip(u, v))

    def vscale(self, c, u):
        return tuple(self.mul(c, x) for x in u)

    def span(self, vectors, m):
        """Set of all linear combinations of ``vectors`` in F_q^m."""
        out = {(0,) * m}
        for v in vectors:
            out = {self.vadd(u, self.vscale(c, v)) for u in out for c in range(self.q)}
        return frozenset(out)

    def rank(self, vectors, m):
        size, r = len(self.span(vectors, m)), 0
        while self.q ** r < size:
            r += 1
        return r

    def all_vectors(self, m):
        return list(itertools.product(range(self.q), repeat=m))

    def subspaces(self, m, dim):
        """Every dim-dimensional subspace of F_q^m (as frozensets of vectors)."""
        level = {frozenset([(0,) * m])}
        vectors = self.all_vectors(m)
        for _ in range(dim):
            level = {self._extend(S, v)
                     for S in level for v in vectors if v not in S}
        return sorted(level, key=sorted)

    def _extend(self, S, v):
        return frozenset(self.vadd(u, self.vscale(c, v)) for u in S for c in range(self.q))


def columns(M):
    M = np.asarray(M)
    return [tuple(int(x) for x in M[:, j]) for j in range(M.shape[1])]


def rows(M):
    return [tuple(int(x) for x in r) for r in np.asarray(M)]


def beta_oracle(w: int, t, q: int, m: int) -> Fraction:
    """Pr{[T D] spans F_q^m} for D = [e_1 .. e_w], column space of T uniform per rank.

    ``t`` is a sequence of Fractions.
    """
    F = SlowField(q.bit_length() - 1)
    D = [tuple(int(i == j) for i in range(m)) for j in range(w)]
    full = q ** m
    total = Fraction(0)
    for i, p in enumerate(t):
        if p == 0:
            continue
        subs = F.subspaces(m, i)
        good = sum(1 for U in subs if len(F.span(list(_basis_of(U, F, m)) + D, m)) == full)
        total += Fraction(p) * Fraction(good, len(subs))
    return total


def _basis_of(S, F, m):
    basis, cur = [], frozenset([(0,) * m])
    for v in sorted(S):
        if v not in cur:
            basis.append(v)
            cur = F.span(basis, m)
    return basis


def is_rref(R: np.ndarray) -> bool:
    """Leading ones, strictly increasing pivots, zeros above and below, zero rows last."""
    last = -1
    zero_seen = False
    for r in R:
        nz = np.flatnonzero(r)
        if nz.size == 0:
            zero_seen = True
            continue
        if zero_seen or nz[0] <= last or r[nz[0]] != 1:
            return False
        col = R[:, nz[0]]
        if np.count_nonzero(col) != 1:
            return False
        last = nz[0]
    return True


def bp_reference(code, ranks_ok):
    """Sequential peeling with a predicate ``ranks_ok(j, known_set)``; order agnostic fixed point."""
    known = set()
    changed = True
    while changed:
        changed = False
        for j, c in enumerate(code.chunks):
            if not set(c) <= known and ranks_ok(j, known):
                known |= set(c)
                changed = True
    return known


def random_decoding_instance(rng, m_max=8, L=2):
    """Small random code with payload-carrying transfer records.

    Returns (code, field, records, packets).  Ranks are drawn uniformly so a
    good share of chunks need help from their neighbours.
    """
    from ecnc.codes import construct_ec, construct_h2t, construct_rac
    from ecnc.decoder import ChunkTransferRecord
    from ecnc.field import gf
    from ecnc.graphs import random_regular_graph
    from ecnc.rank_model import sample_uniform_subspace_matrix

    F = gf(int(rng.choice([1, 2])))
    m = int(rng.integers(3, m_max + 1))
    kind = rng.choice(["ec", "h2t", "rac"])
    if kind == "ec":
        d = int(rng.integers(3, m + 1))
        n = int(rng.integers(d + 1, 13))
        n += (n * d) % 2
        code = construct_ec(random_regular_graph(n, d, rng), m)
    elif kind == "h2t":
        n = int(rng.integers(3, 10))
        code = construct_h2t(n, m, int(rng.integers(0, m - (m - 1) // n)))
    else:
        n = int(rng.integers(3, 10))
        a = int(rng.integers(0, m))
        while a > (n - 1) * (m - a):
            a -= 1
        code = construct_rac(n, m - a, a, rng)
    packets = F.random((code.k, L), rng)
    records = []
    for j, c in enumerate(code.chunks):
        r = int(rng.integers(max(0, m - 3), m + 1))
        T = sample_uniform_subspace_matrix(m, r, F, rng)
        records.append(ChunkTransferRecord(j, T, F.matmul(packets[list(c)].T, T)))
    return code, F, records, packets
