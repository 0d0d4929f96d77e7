"""Belief-propagation (peeling) decoding of overlapped chunked codes.

A chunk is decodable once its transfer matrix, extended by one standard
basis column per already recovered packet of the chunk, has full row rank.
Iterations are synchronous: a chunk examined in iteration i sees exactly the
packets recovered in iterations before i.

Payload mode (every record carries Y) solves for the packet values; rank
mode only tracks which packets are recoverable.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .codes import ChunkedCode
from .errors import IntegrityError, ParameterError
from .field import Field


@dataclass
class ChunkTransferRecord:
    chunk: int
    T: np.ndarray                        # m x r, full column rank
    Y: np.ndarray | None = None          # L x r payloads, Y = B_j T

    @property
    def rank(self) -> int:
        return self.T.shape[1]

    def check(self, field: Field):
        if field.rank(self.T) != self.T.shape[1]:
            raise ParameterError(f"transfer matrix of chunk {self.chunk} is not full column rank")
        if self.Y is not None and self.Y.shape[1] != self.T.shape[1]:
            raise ParameterError(f"chunk {self.chunk}: Y and T disagree on the number of columns")


@dataclass
class DecoderState:
    known: np.ndarray                    # bool per input packet
    decoded: np.ndarray                  # bool per chunk
    values: np.ndarray | None = None     # k x L recovered payloads
    iterations: int = 0
    checks: int = 0
    work: int = 0                        # field multiply-adds in elimination
    history: list = dc_field(default_factory=list)   # packets recovered per iteration

    @property
    def recovered(self) -> int:
        return int(self.known.sum())

    @property
    def known_indices(self) -> set:
        return set(np.flatnonzero(self.known).tolist())

    def summary(self) -> dict:
        return {"decoded_chunks": int(self.decoded.sum()), "recovered_packets": self.recovered,
                "iterations": self.iterations}


def _augment(T: np.ndarray, positions) -> np.ndarray:
    m = T.shape[0]
    E = np.zeros((m, len(positions)), dtype=np.uint8)
    E[positions, np.arange(len(positions))] = 1
    return np.concatenate([T, E], axis=1)


def is_decodable(rec: ChunkTransferRecord, known_positions, field: Field,
                 counter: list | None = None) -> bool:
    """rank([T E_K]) == m, K being positions (within the chunk) already recovered."""
    m = rec.T.shape[0]
    K = sorted(known_positions)
    if rec.T.shape[1] + len(K) < m:
        return False
    return field.rank(_augment(rec.T, K), counter=counter) == m


def bp_decode(code: ChunkedCode, records, field: Field, *, max_iterations: int | None = None,
              order=None, validate: bool = True) -> DecoderState:
    """Peel until an iteration decodes nothing (or ``max_iterations`` pass).

    ``records`` holds one ChunkTransferRecord per chunk, in any order.
    ``order`` fixes the scan order of chunks within an iteration.
    """
    n, k, m = code.n, code.k, code.m
    by_chunk = {}
    for rec in records:
        if rec.chunk in by_chunk:
            raise ParameterError(f"two records for chunk {rec.chunk}")
        if rec.T.shape[0] != m:
            raise ParameterError(f"record for chunk {rec.chunk} has {rec.T.shape[0]} rows, m = {m}")
        if validate:
            rec.check(field)
        by_chunk[rec.chunk] = rec
    if len(by_chunk) != n or set(by_chunk) != set(range(n)):
        raise ParameterError("need exactly one record per chunk")

    payload = all(r.Y is not None for r in by_chunk.values())
    L = by_chunk[0].Y.shape[0] if payload and n else 0
    state = DecoderState(np.zeros(k, dtype=bool), np.zeros(n, dtype=bool),
                         np.zeros((k, L), dtype=np.uint8) if payload else None)
    members = {j: np.asarray(code.chunks[j]) for j in range(n)}
    counter = [0]
    scan = list(range(n)) if order is None else list(order)
    position = {j: p for p, j in enumerate(scan)}
    candidates = scan

    while candidates:
        if max_iterations is not None and state.iterations >= max_iterations:
            break
        snapshot = state.known.copy()
        found = {}                       # packet -> value (or None in rank mode)
        hit = False
        for j in candidates:
            if state.decoded[j]:
                continue
            idx = members[j]
            K = np.flatnonzero(snapshot[idx])
            rec = by_chunk[j]
            state.checks += 1
            if len(K) == m:
                state.decoded[j] = True
                continue
            if not is_decodable(rec, K, field, counter):
                continue
            state.decoded[j] = True
            hit = True
            if payload:
                A = _augment(rec.T, K)
                Y = np.concatenate([rec.Y, state.values[idx[K]].T], axis=1)
                B = field.solve_full_rank(A, Y, counter=counter)
                for pos, i in enumerate(idx.tolist()):
                    if snapshot[i]:
                        continue
                    if i in found and not np.array_equal(found[i], B[:, pos]):
                        raise IntegrityError(f"chunks disagree on the value of packet {i}")
                    found[i] = B[:, pos]
            else:
                for i in idx[~snapshot[idx]].tolist():
                    found[i] = None
        if not hit:
            break
        state.iterations += 1
        new = sorted(found)
        state.history.append(len(new))
        if new:
            state.known[new] = True
            if payload:
                state.values[new] = np.stack([found[i] for i in new])
        touched = {j for i in new for j in code.chunks_of(i) if not state.decoded[j]}
        candidates = sorted(touched, key=position.__getitem__)

    state.work = counter[0]
    return state


def decode_fraction(state: DecoderState, k: int) -> float:
    return state.recovered / k if k else 0.0
