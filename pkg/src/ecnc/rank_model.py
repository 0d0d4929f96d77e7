"""Rank distributions of transfer matrices and decodability with side information.

The coefficient of ``t_i`` in ``beta`` is a ratio of subspace counts, so it is
computed exactly with integers (cached per (m, q)) and converted to float only
when it meets a float distribution.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import floor, prod
from typing import Sequence

import numpy as np

from .errors import InvariantViolation, ParameterError, ParseError
from .field import Field

SUM_TOL = 1e-12


@dataclass(frozen=True)
class RankDistribution:
    """Law of rank(T) over {0, .., m}."""

    m: int
    t: tuple

    def __post_init__(self):
        t = tuple(self.t)
        object.__setattr__(self, "t", t)
        if len(t) != self.m + 1:
            raise ParameterError(f"need m+1 = {self.m + 1} probabilities, got {len(t)}")
        if any(p < 0 for p in t):
            raise ParameterError("probabilities must be nonnegative")
        if abs(sum(t) - 1) > SUM_TOL:
            raise ParameterError(f"probabilities sum to {float(sum(t))!r}, not 1")

    @classmethod
    def point_mass(cls, m: int, r: int) -> RankDistribution:
        return cls(m, tuple(1.0 if i == r else 0.0 for i in range(m + 1)))

    @classmethod
    def uniform(cls, m: int) -> RankDistribution:
        return cls(m, (1.0 / (m + 1),) * (m + 1))

    @classmethod
    def from_counts(cls, counts: Sequence[int]) -> RankDistribution:
        total = sum(counts)
        return cls(len(counts) - 1, tuple(c / total for c in counts))

    def mean(self) -> float:
        return sum(i * p for i, p in enumerate(self.t))

    def to_line(self) -> str:
        return " ".join([str(self.m)] + [repr(float(p)) for p in self.t])

    @classmethod
    def from_line(cls, line: str, lineno: int | None = None) -> RankDistribution:
        parts = line.split()
        try:
            m = int(parts[0])
            t = tuple(float(x) for x in parts[1:])
            return cls(m, t)
        except (IndexError, ValueError) as exc:
            raise ParseError(f"bad rank distribution {line.strip()!r}: {exc}", lineno) from None


def read_rank_distributions(text: str) -> list[RankDistribution]:
    out = []
    for n, line in enumerate(text.splitlines(), start=1):
        if line.strip() and not line.lstrip().startswith("#"):
            out.append(RankDistribution.from_line(line, n))
    return out


def mean_rank(t: RankDistribution) -> float:
    return t.mean()


def upper_bound_rate(t: RankDistribution) -> float:
    """t-bar / m, the ceiling on any chunked code's achievable rate."""
    return t.mean() / t.m


# Gaussian binomials


def gaussian_binomial(w: int, i: int, q: int) -> int:
    """Number of i-dimensional subspaces of F_q^w.

    Always an integer; wrap in ``float`` for the float view.
    """
    if i < 0:
        raise ParameterError("i must be nonnegative")
    if i > w:
        return 0
    num = prod(q**w - q**j for j in range(i))
    den = prod(q**i - q**j for j in range(i))
    return num // den


@lru_cache(maxsize=None)
def _beta_coefficients(m: int, q: int) -> tuple:
    """coef[w][i] = q^((m-i)(m-w)) [w, m-i] / [m, i] as Fractions."""
    out = []
    for w in range(m + 1):
        row = []
        for i in range(m + 1):
            if i < m - w:
                row.append(Fraction(0))
            else:
                row.append(Fraction(q ** ((m - i) * (m - w)) * gaussian_binomial(w, m - i, q),
                                    gaussian_binomial(m, i, q)))
        out.append(tuple(row))
    return tuple(out)


def beta(w: int, t: RankDistribution, q: int):
    """Pr{rk([T D]) = m} for a fixed D of rank w.

    Exact (a Fraction) when every t_i is a Fraction or int, float otherwise.
    """
    m = t.m
    if not 0 <= w <= m:
        raise ParameterError(f"w must be in 0..{m}, got {w}")
    coef = _beta_coefficients(m, q)[w]
    if all(isinstance(p, (int, Fraction)) for p in t.t):
        return sum((coef[i] * t.t[i] for i in range(m - w, m + 1)), Fraction(0))
    return float(sum(float(coef[i]) * t.t[i] for i in range(m - w, m + 1)))


@dataclass(frozen=True)
class BetaTable:
    m: int
    q: int
    values: tuple

    @property
    def d_max(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, w):
        return self.values[w]

    def __len__(self):
        return len(self.values)


def beta_table(t: RankDistribution, q: int, d_max: int | None = None) -> BetaTable:
    """beta_0 .. beta_{d_max}; raises InvariantViolation if not nondecreasing."""
    d_max = t.m if d_max is None else d_max
    values = tuple(beta(w, t, q) for w in range(d_max + 1))
    for a, b in zip(values, values[1:]):
        if b < a - 1e-12:
            raise InvariantViolation(f"beta table not monotone: {values}")
    return BetaTable(t.m, q, values)


# Random subspaces and rank laws


def sample_uniform_subspace_matrix(m: int, r: int, field: Field, rng: np.random.Generator) -> np.ndarray:
    """m x r full-column-rank matrix whose column space is uniform among r-dim subspaces."""
    if not 0 <= r <= m:
        raise ParameterError(f"rank {r} outside 0..{m}")
    if r == 0:
        return np.zeros((m, 0), dtype=np.uint8)
    while True:
        A = field.random((m, r), rng)
        if field.rank(A) == r:
            return A


def full_rank_count(m: int, n: int, r: int, q: int) -> int:
    """Number of m x n matrices over F_q with rank exactly r."""
    if r > min(m, n):
        return 0
    return prod((q**m - q**i) * (q**n - q**i) for i in range(r)) // prod(q**r - q**i for i in range(r))


def rank_law_totally_random(m: int, n_cols: int, q: int, exact: bool = False) -> RankDistribution:
    """Rank law of an m x n_cols matrix with i.i.d. uniform entries."""
    total = q ** (m * n_cols)
    probs = [Fraction(full_rank_count(m, n_cols, r, q), total) for r in range(m + 1)]
    if not exact:
        probs = [float(p) for p in probs]
    return RankDistribution(m, tuple(probs))


def sample_simplex(k: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform point of the (k-1)-simplex by differences of sorted uniforms."""
    u = np.sort(rng.random(k - 1))
    return np.diff(np.concatenate([[0.0], u, [1.0]]))


def mixing_weight(lower: Sequence[float], upper: Sequence[float], a: int, tbar: float) -> float:
    """Weight on ``lower`` (support 0..a) so the mixture with ``upper`` has mean tbar."""
    lo = sum(i * p for i, p in enumerate(lower))
    hi = sum((a + 1 + i) * p for i, p in enumerate(upper))
    return (hi - tbar) / (hi - lo)


def sample_rank_distribution(tbar: float, m: int, rng: np.random.Generator,
                             max_tries: int = 1000) -> RankDistribution:
    """Random rank distribution on 0..m with mean tbar.

    A distribution on {0..a} (a = floor(tbar)) and one on {a+1..m} are drawn
    from the uniform simplex and mixed to hit the mean.
    """
    if not 0 < tbar < m:
        raise ParameterError(f"mean rank must lie in (0, {m}), got {tbar}")
    a = floor(tbar)
    for _ in range(max_tries):
        lower = sample_simplex(a + 1, rng)
        upper = sample_simplex(m - a, rng)
        lo = float(np.dot(np.arange(a + 1), lower))
        hi = float(np.dot(np.arange(a + 1, m + 1), upper))
        if hi - lo < 1e-12:
            continue
        eta = mixing_weight(lower, upper, a, tbar)
        if not 0 <= eta <= 1:
            continue
        t = np.concatenate([eta * lower, (1 - eta) * upper])
        t = t / t.sum()
        return RankDistribution(m, tuple(float(x) for x in t))
    raise ParameterError(f"could not sample a distribution with mean {tbar}")


def synthetic_transfer_matrix(t: RankDistribution, field: Field, rng: np.random.Generator) -> np.ndarray:
    """Transfer matrix with rank drawn from t and a uniform column space."""
    r = int(rng.choice(t.m + 1, p=np.asarray(t.t, dtype=float)))
    return sample_uniform_subspace_matrix(t.m, r, field, rng)
