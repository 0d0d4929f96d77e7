"""Random d-regular graphs and their local structure.

Nodes are ``0 .. n-1``.  The text format is 1-indexed: a header ``n d``
followed by one ``u v`` line per edge.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import GenerationError, ParameterError, ParseError

# Pairing with full restart succeeds with probability ~exp(-(d^2-1)/4); past
# this many expected restarts switch to re-pairing only the bad stubs.
MAX_EXPECTED_RESTARTS = 100.0


@dataclass
class RegularGraph:
    n: int
    d: int
    edges: list                      # [(u, v), ...] in labeling order
    adjacency: list = field(init=False, repr=False)

    def __post_init__(self):
        self.edges = [(int(u), int(v)) for u, v in self.edges]
        adj = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        self.adjacency = adj

    def validate(self):
        """Raise ParameterError unless the graph is simple and d-regular."""
        seen = set()
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ParameterError(f"edge ({u}, {v}) has an endpoint outside 0..{self.n - 1}")
            if u == v:
                raise ParameterError(f"self-loop at node {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ParameterError(f"parallel edge {key}")
            seen.add(key)
        for v, nb in enumerate(self.adjacency):
            if len(nb) != self.d:
                raise ParameterError(f"node {v} has degree {len(nb)}, expected {self.d}")

    def is_simple_regular(self) -> bool:
        try:
            self.validate()
        except ParameterError:
            return False
        return True

    def incident_edges(self, v: int) -> list[int]:
        """Edge IDs incident to v, in edge-list order."""
        return self._incidence[v]

    @property
    def _incidence(self):
        inc = getattr(self, "_inc_cache", None)
        if inc is None:
            inc = [[] for _ in range(self.n)]
            for eid, (u, v) in enumerate(self.edges):
                inc[u].append(eid)
                inc[v].append(eid)
            self._inc_cache = inc
        return inc

    def to_text(self, header: str | None = None) -> str:
        lines = [header] if header else []
        lines.append(f"{self.n} {self.d}")
        lines += [f"{u + 1} {v + 1}" for u, v in self.edges]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> RegularGraph:
        rows = [(i, line.split()) for i, line in enumerate(text.splitlines(), start=1)
                if line.strip() and not line.lstrip().startswith("#")]
        if not rows:
            raise ParseError("empty graph file")
        try:
            n, d = (int(x) for x in rows[0][1])
        except ValueError:
            raise ParseError("header must be 'n d'", rows[0][0]) from None
        edges = []
        for lineno, parts in rows[1:]:
            try:
                u, v = (int(x) - 1 for x in parts)
            except ValueError:
                raise ParseError(f"expected 'u v', got {' '.join(parts)!r}", lineno) from None
            edges.append((u, v))
        g = cls(n, d, edges)
        try:
            g.validate()
        except ParameterError as exc:
            raise ParseError(str(exc)) from None
        return g


def _check_params(n: int, d: int):
    if (n * d) % 2:
        raise ParameterError(f"n*d must be even, got n={n}, d={d}")
    if not 0 <= d < n:
        raise ParameterError(f"need 0 <= d < n, got n={n}, d={d}")


def _pairing_attempt(n: int, d: int, rng: np.random.Generator):
    stubs = rng.permutation(np.repeat(np.arange(n), d))
    u, v = stubs[0::2], stubs[1::2]
    if np.any(u == v):
        return None
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    keys = lo.astype(np.int64) * n + hi
    if np.unique(keys).size != keys.size:
        return None
    order = np.argsort(keys)
    return list(zip(lo[order].tolist(), hi[order].tolist()))


def _repair_attempt(n: int, d: int, rng: np.random.Generator):
    # Pair all stubs, keep the good pairs, re-pair the remainder until stuck.
    edges = set()
    stubs = np.repeat(np.arange(n), d)
    while stubs.size:
        stubs = rng.permutation(stubs)
        bad = []
        for a, b in zip(stubs[0::2].tolist(), stubs[1::2].tolist()):
            key = (a, b) if a < b else (b, a)
            if a != b and key not in edges:
                edges.add(key)
            else:
                bad += [a, b]
        if not bad:
            break
        if len(bad) == stubs.size:
            rest = sorted(set(bad))
            if not any(x != y and (x, y) not in edges for i, x in enumerate(rest) for y in rest[i + 1:]):
                return None
        stubs = np.array(bad, dtype=np.int64)
    return sorted(edges)


def random_regular_graph(n: int, d: int, rng: np.random.Generator, method: str = "auto",
                         max_attempts: int = 100_000) -> RegularGraph:
    """Random simple d-regular graph on n nodes.

    ``pairing`` restarts the configuration model until it is simple, which is
    exactly uniform.  ``repair`` re-pairs only the colliding stubs and is
    asymptotically uniform; ``auto`` uses it only when full restarts would be
    too slow.
    """
    _check_params(n, d)
    if method == "auto":
        method = "pairing" if (d * d - 1) / 4 <= math.log(MAX_EXPECTED_RESTARTS) else "repair"
    attempt = {"pairing": _pairing_attempt, "repair": _repair_attempt}[method]
    for _ in range(max_attempts):
        edges = attempt(n, d, rng)
        if edges is not None:
            return RegularGraph(n, d, edges)
    raise GenerationError(f"no simple {d}-regular graph on {n} nodes after {max_attempts} attempts")


def l_radius(n: int, d: int) -> int:
    """floor(log_{d-1}(n) / 3), computed with integers."""
    if d < 3 or n < d + 1:
        raise ParameterError(f"need n >= d+1 >= 4, got n={n}, d={d}")
    l = 0
    while (d - 1) ** (3 * (l + 1)) <= n:
        l += 1
    return l


def cycle_counts(g: RegularGraph, max_len: int) -> dict[int, int]:
    """Exact number of cycles of each length 3..max_len.

    Each cycle is enumerated from its smallest node, once per direction.
    """
    adj = g.adjacency
    counts = {r: 0 for r in range(3, max_len + 1)}
    if max_len < 3:
        return counts
    for s in range(g.n):
        higher = [w for w in adj[s] if w > s]
        targets = set(higher)
        on_path = {s}

        def extend(v, depth):
            # depth = number of edges on the current path s .. v
            if depth >= 2 and v in targets:
                counts[depth + 1] += 1
            if depth + 1 >= max_len:
                return
            for w in adj[v]:
                if w > s and w not in on_path:
                    on_path.add(w)
                    extend(w, depth + 1)
                    on_path.discard(w)

        for w in higher:
            on_path.add(w)
            extend(w, 1)
            on_path.discard(w)
    return {r: c // 2 for r, c in counts.items()}


def is_tree_neighborhood(g: RegularGraph, v: int, l: int) -> bool:
    """Whether the subgraph induced by nodes within distance l of v is a tree."""
    dist = {v: 0}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        if dist[u] == l:
            continue
        for w in g.adjacency[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    induced = sum(1 for u in dist for w in g.adjacency[u] if w in dist) // 2
    return induced == len(dist) - 1


@dataclass
class NeighborhoodReport:
    l: int
    is_tree: list
    tree_count: int
    cycles: dict            # length -> count, lengths 3..2l+1


def neighborhood_census(g: RegularGraph, l: int) -> NeighborhoodReport:
    if l < 0:
        raise ParameterError("l must be nonnegative")
    flags = [is_tree_neighborhood(g, v, l) for v in range(g.n)]
    return NeighborhoodReport(l, flags, sum(flags), cycle_counts(g, 2 * l + 1))


def expected_cycle_count(d: int, r: int) -> float:
    """Asymptotic mean number of r-cycles in a random d-regular graph."""
    return (d - 1) ** r / (2 * r)
