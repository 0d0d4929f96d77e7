import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chisquare

from ecnc import rank_model
from ecnc.errors import InvariantViolation, ParameterError, ParseError
from ecnc.field import gf
from ecnc.rank_model import (RankDistribution, beta, beta_table, full_rank_count, gaussian_binomial,
                             mean_rank, mixing_weight, rank_law_totally_random, read_rank_distributions,
                             sample_rank_distribution, sample_uniform_subspace_matrix,
                             synthetic_transfer_matrix, upper_bound_rate)

from oracles import SlowField, beta_oracle


# RankDistribution


def test_distribution_validation():
    with pytest.raises(ParameterError):
        RankDistribution(2, (0.5, 0.5))
    with pytest.raises(ParameterError):
        RankDistribution(1, (1.5, -0.5))
    with pytest.raises(ParameterError):
        RankDistribution(1, (0.5, 0.5 + 1e-9))
    RankDistribution(1, (0.5, 0.5 + 1e-13))


def test_line_roundtrip_and_parse_errors():
    t = RankDistribution(3, (0.1, 0.2, 0.3, 0.4))
    assert RankDistribution.from_line(t.to_line()) == t
    text = "# comment\n" + t.to_line() + "\n\n3 0.1 0.2 x 0.4\n"
    with pytest.raises(ParseError, match="line 4"):
        read_rank_distributions(text)
    assert read_rank_distributions("# c\n" + t.to_line()) == [t]


def test_mean_and_upper_bound():
    assert upper_bound_rate(RankDistribution.point_mass(8, 8)) == 1.0
    assert upper_bound_rate(RankDistribution.uniform(8)) == pytest.approx(0.5)
    t = sample_rank_distribution(0.7 * 16, 16, np.random.default_rng(0))
    assert upper_bound_rate(t) == pytest.approx(0.7, abs=1e-9)
    assert mean_rank(t) == t.mean()


# Gaussian binomials


def test_gaussian_binomial_examples():
    assert gaussian_binomial(5, 0, 3) == 1
    assert gaussian_binomial(3, 2, 2) == 7
    assert gaussian_binomial(2, 3, 2) == 0
    with pytest.raises(ParameterError):
        gaussian_binomial(2, -1, 2)


@given(st.integers(0, 12), st.integers(0, 12), st.sampled_from([2, 4, 16, 256]))
def test_gaussian_binomial_symmetry(w, i, q):
    if i <= w:
        assert gaussian_binomial(w, i, q) == gaussian_binomial(w, w - i, q)


@pytest.mark.parametrize("m,q", [(3, 2), (4, 2), (2, 4), (3, 4)])
def test_gaussian_binomial_counts_subspaces(m, q):
    S = SlowField(q.bit_length() - 1)
    for i in range(m + 1):
        assert gaussian_binomial(m, i, q) == len(S.subspaces(m, i))


# beta


def test_beta_point_mass_at_m():
    t = RankDistribution.point_mass(6, 6)
    assert all(beta(w, t, 256) == 1 for w in range(7))


def test_beta_zero_is_tm():
    t = sample_rank_distribution(10.0, 16, np.random.default_rng(1))
    assert beta(0, t, 256) == pytest.approx(t.t[-1], abs=1e-15)


def test_beta_uniform_m3_w1_against_enumeration():
    t = RankDistribution(3, (Fraction(1, 4),) * 4)
    assert beta(1, t, 2) == beta_oracle(1, t.t, 2, 3)


@pytest.mark.parametrize("m,q", [(3, 2), (4, 2), (2, 4), (3, 4)])
def test_beta_against_enumeration(m, q):
    rng = np.random.default_rng(m * q)
    raw = rng.integers(0, 5, size=m + 1) + 1
    t = RankDistribution(m, tuple(Fraction(int(x), int(raw.sum())) for x in raw))
    for w in range(m + 1):
        assert beta(w, t, q) == beta_oracle(w, t.t, q, m)


def test_beta_out_of_range():
    with pytest.raises(ParameterError):
        beta(5, RankDistribution.uniform(4), 2)


dists = st.tuples(st.integers(2, 20), st.sampled_from([2, 4, 256]), st.integers(0, 2**32 - 1))


@settings(max_examples=60, deadline=None)
@given(dists)
def test_beta_monotone_in_w(args):
    m, q, seed = args
    rng = np.random.default_rng(seed)
    t = RankDistribution(m, tuple((rng.dirichlet(np.ones(m + 1))).tolist()))
    tab = beta_table(t, q)
    assert tab.d_max == m and len(tab) == m + 1
    assert all(0 <= b <= 1 + 1e-12 for b in tab.values)
    assert tab[m] >= tab[0]
    assert tab[0] == pytest.approx(t.t[-1])


def test_beta_table_flags_non_monotone(monkeypatch):
    monkeypatch.setattr(rank_model, "beta", lambda w, t, q: 1.0 - 0.1 * w)
    with pytest.raises(InvariantViolation):
        beta_table(RankDistribution.uniform(3), 2)


def test_beta_monte_carlo_footstone():
    F = gf(1)
    m, w, trials = 4, 2, 20000
    t = RankDistribution.uniform(m)
    rng = np.random.default_rng(7)
    D = np.eye(m, dtype=np.uint8)[:, :w]
    hits = sum(F.rank(np.concatenate([synthetic_transfer_matrix(t, F, rng), D], axis=1)) == m
               for _ in range(trials))
    p = beta(w, t, 2)
    assert abs(hits / trials - p) <= 3 * np.sqrt(p * (1 - p) / trials)


# rank laws and subspace sampling


def test_rank_law_examples():
    assert rank_law_totally_random(4, 0, 2).t == (1.0, 0, 0, 0, 0)
    law = rank_law_totally_random(2, 2, 2, exact=True)
    assert law.t == (Fraction(1, 16), Fraction(9, 16), Fraction(6, 16))
    full = rank_law_totally_random(6, 6, 256).t[-1]
    assert full == pytest.approx(np.prod([1 - 256.0**-i for i in range(1, 7)]), rel=1e-12)


@pytest.mark.parametrize("m,n,q", [(m, n, 2) for m in range(1, 4) for n in range(0, 4)]
                         + [(1, 2, 4), (2, 2, 4), (2, 3, 4), (3, 2, 4)])
def test_rank_law_against_enumeration(m, n, q):
    S = SlowField(q.bit_length() - 1)
    counts = [0] * (m + 1)
    for entries in itertools.product(range(q), repeat=m * n):
        M = np.array(entries).reshape(m, n) if n else np.zeros((m, 0))
        counts[S.rank([tuple(M[:, j]) for j in range(n)], m)] += 1
    law = rank_law_totally_random(m, n, q, exact=True)
    assert sum(law.t) == 1
    assert list(law.t) == [Fraction(c, q ** (m * n)) for c in counts]
    assert [full_rank_count(m, n, r, q) for r in range(m + 1)] == counts


def test_subspace_sampler_edges():
    F = gf(8)
    rng = np.random.default_rng(0)
    assert sample_uniform_subspace_matrix(5, 0, F, rng).shape == (5, 0)
    A = sample_uniform_subspace_matrix(5, 5, F, rng)
    assert F.rank(A) == 5
    with pytest.raises(ParameterError):
        sample_uniform_subspace_matrix(3, 4, F, rng)


def test_subspace_sampler_uniform_chi_square():
    F = gf(1)
    rng = np.random.default_rng(11)
    labels = {}
    for _ in range(70000):
        sig = F.column_space_signature(sample_uniform_subspace_matrix(3, 2, F, rng))
        labels[sig] = labels.get(sig, 0) + 1
    assert len(labels) == gaussian_binomial(3, 2, 2)
    assert chisquare(list(labels.values())).pvalue > 0.01


# rank distribution sampler


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 40), st.floats(0.02, 0.98), st.integers(0, 2**32 - 1))
def test_sampler_hits_mean(m, ratio, seed):
    tbar = ratio * m
    t = sample_rank_distribution(tbar, m, np.random.default_rng(seed))
    assert abs(t.mean() - tbar) < 1e-9
    assert min(t.t) >= 0
    assert abs(sum(t.t) - 1) < 1e-12


def test_sampler_bad_mean():
    rng = np.random.default_rng(0)
    for tbar in (0, 8, -1, 9):
        with pytest.raises(ParameterError):
            sample_rank_distribution(tbar, 8, rng)


def test_mixing_weight_hand_example():
    # lower on {0,1,2}, upper on {3,4}; means 1.0 and 3.5
    lower, upper = [0.25, 0.5, 0.25], [0.5, 0.5]
    eta = mixing_weight(lower, upper, 2, 3.0)
    assert eta == pytest.approx((3.5 - 3.0) / (3.5 - 1.0))
    mix = [eta * p for p in lower] + [(1 - eta) * p for p in upper]
    assert sum(i * p for i, p in enumerate(mix)) == pytest.approx(3.0)


def test_sampler_deterministic():
    a = sample_rank_distribution(12.8, 16, np.random.default_rng(5))
    b = sample_rank_distribution(12.8, 16, np.random.default_rng(5))
    assert a == b
