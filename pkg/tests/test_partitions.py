from __future__ import annotations

import itertools
from collections import Counter
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from quasirank import partitions as pl
from quasirank.rings import cyclo_ring


def brute_partitions(n):
    """Independent enumerator: compositions filtered to non-increasing tuples."""
    if n == 0:
        return [()]
    out = set()
    for cuts in itertools.product((0, 1), repeat=n - 1):
        parts, cur = [], 1
        for c in cuts:
            if c:
                parts.append(cur)
                cur = 1
            else:
                cur += 1
        parts.append(cur)
        out.add(tuple(sorted(parts, reverse=True)))
    return sorted(out)


def brute_crank(p):
    ones = p.count(1)
    if ones == 0:
        return p[0]
    return sum(1 for x in p if x > ones) - ones


@pytest.mark.parametrize("n", range(0, 13))
def test_enumeration_matches_brute_force(n):
    assert sorted(pl.enum_partitions(n)) == brute_partitions(n)


@pytest.mark.parametrize("n", range(1, 13))
def test_rank_and_crank_rows(n):
    ps = brute_partitions(n)
    ranks = Counter(p[0] - len(p) for p in ps)
    assert pl.rank_row(n) == dict(ranks)
    cranks = Counter(brute_crank(p) for p in ps)
    if n == 1:
        cranks = Counter({-1: 1, 0: -1, 1: 1})  # M(0,1) = -1, M(+-1,1) = 1
    assert {m: c for m, c in pl.crank_row(n).items() if c} == {m: c for m, c in cranks.items() if c}


@given(st.integers(1, 25))
def test_symmetry_and_totals(n):
    r, c = pl.rank_row(n), pl.crank_row(n)
    p = sum(r.values())
    assert sum(c.values()) == p
    assert all(r.get(-m, 0) == v for m, v in r.items())
    assert all(c.get(-m, 0) == v for m, v in c.items())
    assert pl.rank_moment(1, n) == 0 and pl.crank_moment(3, n) == 0
    # M_2(n) = 2 n p(n)
    assert pl.crank_moment(2, n) == 2 * n * p


@given(st.integers(-30, 30), st.integers(0, 8))
def test_generalized_binomial(x, k):
    if x >= 0:
        assert pl.gen_binomial(x, k) == comb(x, k)
    assert pl.eta_weight(x, 2) == Fraction((x + 0) * (x - 1), 2)


def test_eta_moment_from_ranks():
    assert pl.eta_moment(2, 4) == 10
    assert pl.moments("eta", 2, 4) == 10
    assert pl.moments("N", 2, 6) == 80


@given(st.integers(1, 9), st.integers(1, 3))
def test_tally_matches_symbol_generator(n, k):
    syms = list(pl.enum_marked_durfee(k, n))
    assert all(s.is_admissible() and s.size == n for s in syms)
    assert len(set(syms)) == len(syms)
    assert pl.durfee_count(k, n) == len(syms)
    fr = Counter(s.full_rank for s in syms)
    assert pl.full_rank_table(k, n)[n] == {m: c for m, c in fr.items()}


@pytest.mark.parametrize("n", range(1, 16))
def test_one_marked_symbols_are_partitions(n):
    # rank of a 1-marked symbol is the Dyson rank of the partition
    assert pl.full_rank_table(1, 15)[n] == pl.rank_row(n)


@pytest.mark.parametrize("k", [2, 3])
def test_durfee_counts_equal_symmetrized_moments(k):
    for n in range(1, 16):
        assert pl.durfee_count(k, n, 15) == pl.eta_moment(2 * k - 2, n)


def test_full_rank_symmetry_and_residues():
    table = pl.full_rank_table(2, 14)
    for n, row in table.items():
        assert all(row.get(-m, 0) == c for m, c in row.items())
    res = pl.full_rank_residue_table(2, 5, 14)
    assert all(sum(res[n]) == pl.durfee_count(2, n, 14) for n in res)


def test_multivariate_at_ones_counts_symbols():
    R = cyclo_ring(5)
    vals = pl.durfee_multivariate(2, [1, 1], 10, R)
    assert [v.coeffs[0] for v in vals[1:]] == [pl.durfee_count(2, n, 10) for n in range(1, 11)]


def test_invalid_symbol_detected():
    good = next(pl.enum_marked_durfee(2, 5))
    assert good.is_admissible()
    bad = pl.MarkedDurfeeSymbol(top=((1, 2),), bottom=(), side=1, marks=2)  # color 1 missing on top
    assert not bad.is_admissible()
    assert "_" in str(good)


def test_stat_table_round_trip():
    t = pl.rank_table(8)
    back = pl.StatTable.from_csv(t.to_csv())
    assert back == t
    assert t.row_sums() == {n: len(brute_partitions(n)) for n in range(1, 9)}
    nf = pl.nf_table(2, 8, 5)
    assert pl.StatTable.from_csv(nf.to_csv()) == nf


def test_twisted_moments_boundary_values():
    R = cyclo_ring(3)
    assert pl.twisted_moments(0, 1, 3, 1, kind="C") == R.root_power(1) + R.root_power(-1) - 1
    # f(q) = sum N(m, n) (-1)^m: coefficient of q^4 is -3
    assert pl.twisted_moments(0, 1, 2, 4, kind="R") == -3
