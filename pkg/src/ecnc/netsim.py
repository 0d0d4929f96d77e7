"""Chunk transmission over a line network of erasure links.

The source sends random combinations of the chunk's packets; every relay
keeps the linearly independent coefficient vectors it hears for the chunk and,
once the upstream node is done with the chunk, sends random combinations of
them.  Each link drops every packet independently with probability ``eps``.

Per-trial generators come from ``SeedSequence([master_seed, trial])`` (see
:func:`trial_seed`), so any trial can be replayed on its own.
"""

from __future__ import annotations

import csv
import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from math import floor
from pathlib import Path

import numpy as np

from .codes import ChunkedCode
from .decoder import ChunkTransferRecord, DecoderState, bp_decode
from .errors import ParameterError, ParseError
from .field import Field, field_for_size
from .rank_model import RankDistribution

SCHEDULERS = ("fixed", "randomized")


@dataclass(frozen=True)
class LineNetworkConfig:
    length: int = 1                 # number of links
    eps: float = 0.0
    mbar: float = 16.0
    scheduler: str = "fixed"
    q: int = 256
    m: int = 16
    seed: int = 0

    def __post_init__(self):
        if self.length < 1:
            raise ParameterError("network length must be at least 1")
        if not 0 <= self.eps <= 1:
            raise ParameterError(f"loss probability must be in [0, 1], got {self.eps}")
        if self.mbar < 0:
            raise ParameterError("mean budget must be nonnegative")
        if self.scheduler not in SCHEDULERS:
            raise ParameterError(f"unknown scheduler {self.scheduler!r}")
        if self.m < 1:
            raise ParameterError("chunk size must be positive")
        field_for_size(self.q)

    @property
    def field(self) -> Field:
        return field_for_size(self.q)

    def replace(self, **kw) -> LineNetworkConfig:
        return LineNetworkConfig(**{**asdict(self), **kw})

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(asdict(self), sort_keys=True).encode()).hexdigest()[:12]

    @classmethod
    def from_file(cls, path) -> LineNetworkConfig:
        """JSON object whose keys are the config field names."""
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc.msg}", exc.lineno) from None
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ParseError(f"{path}: unknown keys {sorted(unknown)}")
        return cls(**data)


def budget(cfg: LineNetworkConfig, chunk: int, rng: np.random.Generator) -> int:
    """Packets a node sends for one chunk.

    ``fixed`` spreads the fractional part of mbar deterministically over
    consecutive chunks; ``randomized`` rounds up with probability equal to it.
    """
    if cfg.scheduler == "fixed":
        return floor((chunk + 1) * cfg.mbar) - floor(chunk * cfg.mbar)
    lo = floor(cfg.mbar)
    return lo + int(rng.random() < cfg.mbar - lo)


def simulate_chunk_transfer(cfg: LineNetworkConfig, rng: np.random.Generator, chunk: int = 0,
                            payload: np.ndarray | None = None, trace: list | None = None):
    """Push one chunk through the line network.

    Returns the destination's full-column-rank transfer matrix T (m x r).  With
    ``payload`` (the chunk's packets as an L x m matrix) payloads travel with
    the coefficient vectors and ``(T, Y)`` is returned.  ``trace`` collects
    per-node ``received``/``stored``/``sent`` matrices.
    """
    F = cfg.field
    m = cfg.m
    L = 0 if payload is None else payload.shape[0]
    S = F.random((m, budget(cfg, chunk, rng)), rng)
    sent = S if payload is None else np.concatenate([S, F.matmul(payload, S)], axis=0)
    if trace is not None:
        trace.append({"node": 0, "sent": sent})
    for hop in range(cfg.length):
        received = sent[:, rng.random(sent.shape[1]) >= cfg.eps]
        stored = received[:, F.independent_columns(received[:m])]
        if hop == cfg.length - 1:
            if trace is not None:
                trace.append({"node": hop + 1, "received": received, "stored": stored})
            break
        M = budget(cfg, chunk, rng)
        if stored.shape[1] == 0:
            sent = np.zeros((m + L, 0), dtype=np.uint8)
        else:
            sent = F.matmul(stored, F.random((stored.shape[1], M), rng))
        if trace is not None:
            trace.append({"node": hop + 1, "received": received, "stored": stored, "sent": sent})
    T = np.ascontiguousarray(stored[:m])
    if payload is None:
        return T
    return T, np.ascontiguousarray(stored[m:])


def estimate_rank_distribution(cfg: LineNetworkConfig, trials: int, rng: np.random.Generator):
    """Empirical rank law over ``trials`` chunk transfers, with standard errors."""
    if trials < 1:
        raise ParameterError("need at least one trial")
    counts = np.zeros(cfg.m + 1, dtype=np.int64)
    for j in range(trials):
        counts[simulate_chunk_transfer(cfg, rng, chunk=j).shape[1]] += 1
    p = counts / trials
    return RankDistribution(cfg.m, tuple(p.tolist())), np.sqrt(p * (1 - p) / trials)


@dataclass
class BudgetScan:
    mbar: float
    bound: float
    rows: list              # (mbar, tbar, tbar/mbar)
    dist: RankDistribution  # rank law at the chosen mbar


def optimize_budget(cfg: LineNetworkConfig, grid, trials: int, rng: np.random.Generator) -> BudgetScan:
    """Scan mean budgets and keep the one maximising tbar / mbar."""
    grid = list(grid)
    if not grid:
        raise ParameterError("empty budget grid")
    rows, best = [], None
    for mb in grid:
        if mb <= 0:
            raise ParameterError("budgets must be positive")
        dist, _ = estimate_rank_distribution(cfg.replace(mbar=float(mb)), trials, rng)
        tbar = dist.mean()
        rows.append((float(mb), tbar, tbar / mb))
        if best is None or tbar / mb > best[1]:
            best = (float(mb), tbar / mb, dist)
    return BudgetScan(best[0], best[1], rows, best[2])


def trial_seed(master_seed: int, trial: int) -> int:
    return int(np.random.SeedSequence([master_seed, trial]).generate_state(1, np.uint64)[0])


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(trial_seed(master_seed, trial))


def run_end_to_end(code: ChunkedCode, cfg: LineNetworkConfig, rng: np.random.Generator,
                   payload_len: int = 0) -> tuple[DecoderState, dict]:
    """Send every chunk of ``code`` over the network and BP-decode.

    With ``payload_len > 0`` random input packets are generated, carried end to
    end and checked against the decoder's output (``payload_ok``).
    """
    if code.m != cfg.m:
        raise ParameterError(f"code chunk size {code.m} != network chunk size {cfg.m}")
    F = cfg.field
    packets = F.random((code.k, payload_len), rng) if payload_len else None
    records = []
    for j, chunk in enumerate(code.chunks):
        if packets is None:
            records.append(ChunkTransferRecord(j, simulate_chunk_transfer(cfg, rng, chunk=j)))
        else:
            T, Y = simulate_chunk_transfer(cfg, rng, chunk=j, payload=packets[list(chunk)].T)
            records.append(ChunkTransferRecord(j, T, Y))
    state = bp_decode(code, records, F, validate=False)
    recovered = state.recovered
    metrics = {
        "decoded_packets": recovered,
        "decode_fraction": recovered / code.k,
        "rate": recovered / (code.n * cfg.mbar) if cfg.mbar else 0.0,
        "code_rate": recovered / (code.n * code.m),
        "rank_sum": int(sum(r.rank for r in records)),
        "decoded_chunks": int(state.decoded.sum()),
        "iterations": state.iterations,
    }
    if packets is not None:
        metrics["payload_ok"] = bool(np.array_equal(state.values[state.known], packets[state.known]))
    return state, metrics


def _one_trial(args):
    make_code, cfg, master_seed, trial, payload_len = args
    rng = trial_rng(master_seed, trial)
    code = make_code(rng)
    _, metrics = run_end_to_end(code, cfg, rng, payload_len)
    return {"trial": trial, "seed": trial_seed(master_seed, trial), "k": code.k, **metrics}


def run_trials(make_code, cfg: LineNetworkConfig, trials: int, master_seed: int,
               workers: int = 1, payload_len: int = 0) -> list[dict]:
    """Independent end-to-end trials, returned in trial order.

    ``make_code(rng)`` builds the code for each trial from that trial's
    generator.  With ``workers > 1`` it must be picklable.
    """
    jobs = [(make_code, cfg, master_seed, t, payload_len) for t in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(_one_trial, jobs, chunksize=max(1, trials // (4 * workers))))
    return [_one_trial(job) for job in jobs]


METRIC_COLUMNS = ["trial", "seed", "decoded_packets", "decode_fraction", "rate"]


def write_metrics_csv(rows, fh, header: str | None = None, columns=METRIC_COLUMNS):
    if header:
        fh.write(header + "\n")
    w = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
