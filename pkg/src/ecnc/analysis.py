"""Achievable-rate analysis of EC codes on random regular generator graphs.

``alpha(y, d)`` is the probability that a node of the decoding tree with
``d - 1`` children decodes when each child decodes independently with
probability ``y``.  Iterating it from 0 gives the fixed point behind the
rate lower bound.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from math import comb

from .errors import InvariantViolation, ParameterError
from .rank_model import BetaTable, RankDistribution, beta_table, upper_bound_rate

FIXED_POINT_TOL = 1e-10
MAX_ITER = 10**6


def alpha(y: float, d: int, betas: BetaTable) -> float:
    if len(betas) < d:
        raise ParameterError(f"need beta_0..beta_{d - 1}, table has {len(betas)} entries")
    n = d - 1
    return sum(comb(n, w) * y**w * (1 - y) ** (n - w) * float(betas[w]) for w in range(d))


def fixed_point(d: int, betas: BetaTable, tol: float = FIXED_POINT_TOL,
                max_iter: int = MAX_ITER) -> tuple[float, list[float]]:
    """Limit of alpha^i(0) and the iterates alpha(0), alpha^2(0), ...

    Stops when successive iterates differ by less than ``tol``.  A decreasing
    step means the beta table is broken and raises InvariantViolation.
    """
    if tol <= 0:
        raise ParameterError("tol must be positive")
    y = 0.0
    trace = []
    for _ in range(max_iter):
        nxt = alpha(y, d, betas)
        if nxt < y - 1e-15 or nxt > 1 + 1e-12:
            raise InvariantViolation(f"alpha iteration left [prev, 1]: {y} -> {nxt}")
        trace.append(nxt)
        if nxt - y < tol:
            return nxt, trace
        y = nxt
    return y, trace


@dataclass
class RateReport:
    m: int
    d: int
    q: int
    betas: tuple
    alpha_star: float
    tau: float
    lam: float
    rate: float
    upper_bound: float
    iterations: int

    def as_row(self) -> dict:
        row = asdict(self)
        row.pop("betas")
        return row


def rate_report(t: RankDistribution, d: int, q: int, tol: float = FIXED_POINT_TOL,
                betas: BetaTable | None = None) -> RateReport:
    m = t.m
    if not 3 <= d <= m:
        raise ParameterError(f"degree must satisfy 3 <= d <= m = {m}, got {d}")
    betas = beta_table(t, q) if betas is None else betas
    a_star, trace = fixed_point(d, betas, tol)
    tau = alpha(a_star, d + 1, betas)
    lam = 1 - (1 - a_star) ** 2
    rate = tau * (1 - d / m) + lam * d / (2 * m)
    return RateReport(m, d, q, tuple(float(b) for b in betas.values), a_star, tau, lam,
                      rate, upper_bound_rate(t), len(trace))


def optimize_degree(t: RankDistribution, q: int, d_range=None,
                    tol: float = FIXED_POINT_TOL) -> tuple[int, RateReport]:
    """Degree maximising the rate bound; ties go to the smaller degree."""
    d_range = range(3, t.m + 1) if d_range is None else list(d_range)
    if not d_range:
        raise ParameterError("empty degree range")
    betas = beta_table(t, q)
    best = None
    for d in d_range:
        rep = rate_report(t, d, q, tol, betas)
        if best is None or rep.rate > best.rate:
            best = rep
    return best.d, best


@dataclass
class DepthPrediction:
    l: int
    d: int
    h: list            # h_0 .. h_l (h_l is the root)
    root: float
    overlap: float

    def rate(self, m: int) -> float:
        """Expected recovered packets per chunk, divided by m."""
        return (self.root * (m - self.d) + self.overlap * self.d / 2) / m

    def decode_fraction(self, m: int) -> float:
        """Expected recovered packets as a fraction of k = n(m - d/2)."""
        return self.rate(m) * m / (m - self.d / 2)


def finite_depth_prediction(l: int, d: int, betas: BetaTable) -> DepthPrediction:
    """Decoding probabilities when BP is confined to a depth-l tree.

    Below the root every node has d - 1 children; the root has d.
    """
    if l < 0:
        raise ParameterError("l must be nonnegative")
    iterates = [0.0]                    # alpha_d^i(0) for i = 0 .. l+1
    for _ in range(l + 1):
        iterates.append(alpha(iterates[-1], d, betas))
    h = iterates[1:l + 1]
    root = alpha(iterates[l], d + 1, betas)
    h.append(root)
    overlap = 1 - (1 - iterates[l]) * (1 - iterates[l + 1])
    return DepthPrediction(l, d, h, root, overlap)
