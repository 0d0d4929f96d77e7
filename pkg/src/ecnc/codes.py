"""Overlapped chunked codes: EC codes from a generator graph, plus the
disjoint, head-to-tail (H2T) and random-annex (RAC) baselines.

Packet indices and chunk IDs are 0-based in memory.  The text format is
1-based: header ``kind k n m`` and one line of m indices per chunk.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ParseError
from .graphs import RegularGraph

KINDS = ("ec", "disjoint", "h2t", "rac")


@dataclass
class ChunkedCode:
    kind: str
    k: int
    m: int
    chunks: list                     # sorted tuples of packet indices
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.chunks = [tuple(sorted(int(i) for i in c)) for c in self.chunks]
        for j, c in enumerate(self.chunks):
            if len(set(c)) != self.m:
                raise ParameterError(f"chunk {j} has {len(set(c))} distinct indices, expected {self.m}")
            if c and (c[0] < 0 or c[-1] >= self.k):
                raise ParameterError(f"chunk {j} has an index outside 0..{self.k - 1}")
        self._members = None

    @property
    def n(self) -> int:
        return len(self.chunks)

    def chunks_of(self, packet: int) -> list[int]:
        """Chunk IDs that contain ``packet``."""
        if self._members is None:
            mem = [[] for _ in range(self.k)]
            for j, c in enumerate(self.chunks):
                for i in c:
                    mem[i].append(j)
            self._members = mem
        return self._members[packet]

    def multiplicity(self) -> np.ndarray:
        counts = np.zeros(self.k, dtype=np.int64)
        for c in self.chunks:
            counts[list(c)] += 1
        return counts

    def is_causal(self) -> bool:
        """max index among chunks 0..j is below m(j+1), for every j."""
        top = -1
        for j, c in enumerate(self.chunks):
            top = max(top, c[-1])
            if top >= self.m * (j + 1):
                return False
        return True

    def to_text(self, header: str | None = None) -> str:
        lines = [header] if header else []
        lines.append(f"{self.kind} {self.k} {self.n} {self.m}")
        lines += [" ".join(str(i + 1) for i in c) for c in self.chunks]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> ChunkedCode:
        rows = [(i, line.split()) for i, line in enumerate(text.splitlines(), start=1)
                if line.strip() and not line.lstrip().startswith("#")]
        if not rows:
            raise ParseError("empty code file")
        lineno, head = rows[0]
        try:
            kind, k, n, m = head[0], int(head[1]), int(head[2]), int(head[3])
        except (IndexError, ValueError):
            raise ParseError("header must be 'kind k n m'", lineno) from None
        if len(rows) - 1 != n:
            raise ParseError(f"header declares {n} chunks, found {len(rows) - 1}")
        chunks = []
        for lineno, parts in rows[1:]:
            try:
                chunks.append([int(x) - 1 for x in parts])
            except ValueError:
                raise ParseError("chunk indices must be integers", lineno) from None
            if len(parts) != m:
                raise ParseError(f"expected {m} indices, got {len(parts)}", lineno)
        return cls(kind, k, m, chunks)


@dataclass
class EcCode(ChunkedCode):
    generator: RegularGraph | None = None
    edge_index: list = field(default_factory=list)     # edge ID -> packet index
    private: list = field(default_factory=list)        # node -> private packet indices


def construct_ec(g: RegularGraph, m: int) -> EcCode:
    """EC code on generator g with causal index labeling.

    Node by node: m - d fresh private indices, then a fresh index for each
    incident edge not yet labeled, taken in the graph's edge-list order.
    """
    d = g.d
    if d > m:
        raise ParameterError(f"degree {d} exceeds chunk size {m}")
    if (g.n * d) % 2:
        raise ParameterError("n*d must be even")
    k = g.n * m - g.n * d // 2
    edge_index = [-1] * len(g.edges)
    private = []
    chunks = []
    nxt = 0
    for v in range(g.n):
        own = list(range(nxt, nxt + m - d))
        nxt += m - d
        private.append(own)
        for eid in g.incident_edges(v):
            if edge_index[eid] < 0:
                edge_index[eid] = nxt
                nxt += 1
        chunks.append(own + [edge_index[e] for e in g.incident_edges(v)])
    assert nxt == k
    return EcCode("ec", k, m, chunks, {"d": d}, generator=g, edge_index=edge_index, private=private)


def construct_disjoint(k: int, m: int) -> ChunkedCode:
    if m <= 0 or k % m:
        raise ParameterError(f"chunk size {m} does not divide k = {k}")
    return ChunkedCode("disjoint", k, m, [range(j * m, (j + 1) * m) for j in range(k // m)])


def construct_h2t(n: int, m: int, overlap: int, rng=None) -> ChunkedCode:
    """Consecutive chunks share ``overlap`` packets, wrapping around at the end.

    With n = 2 the two chunks meet at both ends and share 2 * overlap packets.
    No randomness is involved; ``rng`` is accepted for interface symmetry.
    """
    if not 0 <= overlap < m:
        raise ParameterError(f"overlap must be in 0..{m - 1}, got {overlap}")
    step = m - overlap
    k = n * step
    if overlap and n < 2:
        raise ParameterError("head-to-tail overlap needs at least 2 chunks")
    if k < m:
        raise ParameterError(f"{n} chunks of {m} packets with overlap {overlap} wrap onto themselves")
    chunks = [[(j * step + i) % k for i in range(m)] for j in range(n)]
    kind = "h2t" if overlap else "disjoint"
    return ChunkedCode(kind, k, m, chunks, {"overlap": overlap})


def construct_rac(n: int, base: int, annex: int, rng: np.random.Generator) -> ChunkedCode:
    """Disjoint base chunks of size ``base``, each annexing ``annex`` packets
    drawn without replacement from the other chunks' bases."""
    m = base + annex
    if base <= 0 or annex < 0:
        raise ParameterError("base size must be positive and annex size nonnegative")
    k = n * base
    if annex > k - base:
        raise ParameterError(f"annex size {annex} exceeds the pool of {k - base} foreign packets")
    chunks = []
    for j in range(n):
        own = np.arange(j * base, (j + 1) * base)
        if annex:
            pick = rng.choice(k - base, size=annex, replace=False)
            pick = np.where(pick >= j * base, pick + base, pick)      # skip own base
            own = np.concatenate([own, pick])
        chunks.append(own.tolist())
    kind = "rac" if annex else "disjoint"
    return ChunkedCode(kind, k, m, chunks, {"annex": annex})


def example_generator() -> RegularGraph:
    """The 6-node 3-regular generator drawn in the EC construction example.

    Listed as the ring then the three chords, the order that reproduces the
    example's labels.
    """
    ring = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]
    chords = [(0, 4), (2, 5), (1, 3)]
    return RegularGraph(6, 3, ring + chords)
