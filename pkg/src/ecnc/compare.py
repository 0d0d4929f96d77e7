"""Head-to-head simulation of EC codes against the H2T and RAC baselines."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .analysis import optimize_degree
from .codes import construct_disjoint, construct_ec, construct_h2t, construct_rac
from .graphs import random_regular_graph
from .netsim import LineNetworkConfig, run_trials, trial_seed
from .rank_model import RankDistribution

log = logging.getLogger(__name__)

STREAMS = {"ec": 1, "disjoint": 2, "h2t": 3, "rac": 4}


@dataclass(frozen=True)
class CodeFactory:
    """Picklable per-trial code builder; ``param`` is d, overlap or annex size."""

    kind: str
    n: int
    m: int
    param: int = 0

    def __call__(self, rng: np.random.Generator):
        if self.kind == "ec":
            return construct_ec(random_regular_graph(self.n, self.param, rng), self.m)
        if self.kind == "h2t":
            return construct_h2t(self.n, self.m, self.param)
        if self.kind == "rac":
            return construct_rac(self.n, self.m - self.param, self.param, rng)
        if self.kind == "disjoint":
            return construct_disjoint(self.n * self.m, self.m)
        raise ValueError(f"unknown code kind {self.kind!r}")


def grid_search(kind: str, n: int, cfg: LineNetworkConfig, values, trials: int,
                master_seed: int, workers: int = 1) -> tuple[int, list]:
    """Parameter with the largest mean number of decodable packets.

    Each row is ``{"param", "mean", "runs"}`` with the per-trial metrics.
    """
    best, rows = None, []
    for v in values:
        seed = trial_seed(master_seed, 10_000 * STREAMS[kind] + int(v))
        res = run_trials(CodeFactory(kind, n, cfg.m, int(v)), cfg, trials, seed, workers)
        mean = float(np.mean([r["decoded_packets"] for r in res]))
        rows.append({"param": int(v), "mean": mean, "runs": res})
        log.info("grid %s param=%d mean_decodable=%.2f", kind, v, mean)
        if best is None or mean > best[1]:
            best = (int(v), mean)
    return best[0], rows


def ec_degree(dist: RankDistribution, q: int, n: int) -> int:
    """Rate-optimal degree, restricted to degrees that give a d-regular graph on n nodes."""
    degrees = [d for d in range(3, dist.m + 1) if (n * d) % 2 == 0 and d < n]
    d, _ = optimize_degree(dist, q, degrees)
    return d


def compare_codes(cfg: LineNetworkConfig, n: int, trials: int, master_seed: int, dist: RankDistribution,
                  kinds=("ec", "h2t", "rac"), grid_trials: int = 50, grid=None,
                  workers: int = 1) -> dict:
    """Run every code kind for ``trials`` runs with its parameter chosen first.

    EC takes its degree from the rate analysis of ``dist``; H2T and RAC are
    grid-searched over ``grid`` (default 0..m-1).
    """
    grid = range(cfg.m) if grid is None else grid
    out = {}
    for kind in kinds:
        if kind == "ec":
            param, search = ec_degree(dist, cfg.q, n), []
        elif kind in ("h2t", "rac"):
            param, search = grid_search(kind, n, cfg, grid, grid_trials, master_seed, workers)
        else:
            param, search = 0, []
        seed = trial_seed(master_seed, STREAMS[kind])
        rows = run_trials(CodeFactory(kind, n, cfg.m, param), cfg, trials, seed, workers)
        log.info("%s param=%d mean_decodable=%.2f", kind, param,
                 np.mean([r["decoded_packets"] for r in rows]))
        out[kind] = {"param": param, "grid": search, "rows": rows}
    return out


def deciles(values) -> np.ndarray:
    return np.quantile(np.asarray(values, dtype=float), np.linspace(0.1, 0.9, 9))
