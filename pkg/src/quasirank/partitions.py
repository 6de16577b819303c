"""Brute-force partition statistics.

This module is the combinatorial oracle: everything here is computed by
listing partitions or marked Durfee symbols one at a time, never from a
generating function.
"""
from __future__ import annotations

import csv
import functools
import io
import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from quasirank.rings import CycElement, cyclo_ring

Partition = tuple  # non-increasing tuple of positive ints


def enum_partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """All partitions of n as non-increasing tuples, each exactly once."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if largest is None or largest > n:
        largest = n
    if n == 0:
        yield ()
        return
    for first in range(largest, 0, -1):
        for rest in enum_partitions(n - first, first):
            yield (first,) + rest


def rank_of(parts) -> int:
    if not parts:
        raise ValueError("rank of the empty partition is undefined")
    return parts[0] - len(parts)


def crank_of(parts) -> int:
    """Andrews-Garvan crank."""
    if not parts:
        raise ValueError("crank of the empty partition is undefined")
    ones = parts.count(1)
    if ones == 0:
        return parts[0]
    return sum(1 for p in parts if p > ones) - ones


@functools.lru_cache(maxsize=8)
def _rank_rows(n_max: int) -> tuple:
    return tuple(Counter(rank_of(p) for p in enum_partitions(n)) if n else Counter() for n in range(n_max + 1))


@functools.lru_cache(maxsize=8)
def _crank_rows(n_max: int) -> tuple:
    rows = []
    for n in range(n_max + 1):
        if n == 0:
            rows.append(Counter())
        elif n == 1:
            # the crank of the partition 1 is not meaningful; fixed convention
            rows.append(Counter({-1: 1, 0: -1, 1: 1}))
        else:
            rows.append(Counter(crank_of(p) for p in enum_partitions(n)))
    return tuple(rows)


def rank_row(n: int) -> dict[int, int]:
    """{m: N(m, n)}."""
    return dict(_rank_rows(n)[n])


def crank_row(n: int) -> dict[int, int]:
    """{m: M(m, n)} including the n = 1 convention."""
    return dict(_crank_rows(n)[n])


def count_rank(m: int, n: int) -> int:
    return rank_row(n).get(m, 0)


def count_crank(m: int, n: int) -> int:
    return crank_row(n).get(m, 0)


def gen_binomial(x: int, k: int) -> Fraction:
    """Polynomial binomial coefficient x(x-1)...(x-k+1)/k!, valid for negative x."""
    num = 1
    den = 1
    for i in range(k):
        num *= x - i
        den *= i + 1
    return Fraction(num, den)


def eta_weight(m: int, k: int) -> Fraction:
    return gen_binomial(m + (k - 1) // 2, k)


def rank_moment(j: int, n: int) -> int:
    """N_j(n)."""
    return sum(m ** j * c for m, c in rank_row(n).items())


def crank_moment(j: int, n: int) -> int:
    """M_j(n)."""
    return sum(m ** j * c for m, c in crank_row(n).items())


def eta_moment(k: int, n: int) -> Fraction:
    """Symmetrized rank moment eta_k(n)."""
    return sum((eta_weight(m, k) * c for m, c in rank_row(n).items()), Fraction(0))


def moments(kind: str, order: int, n: int):
    """Dispatch on ``kind`` in {"N", "M", "eta"}."""
    if kind == "N":
        return rank_moment(order, n)
    if kind == "M":
        return crank_moment(order, n)
    if kind == "eta":
        return eta_moment(order, n)
    raise ValueError(f"unknown moment kind {kind!r}")


def twisted_moments(j: int, a: int, c: int, n: int, kind: str = "R") -> CycElement:
    """sum_k k^j zeta_c^(a k) N(k, n) (kind "R") or the crank analogue (kind "C")."""
    if not 0 < a < c:
        raise ValueError("need 0 < a < c")
    ring = cyclo_ring(c)
    row = rank_row(n) if kind == "R" else crank_row(n)
    total = ring.zero
    for m, cnt in row.items():
        total = total + ring.root_power(a * m) * (m ** j * cnt)
    return total


# ---------------------------------------------------------------------------
# marked Durfee symbols


@dataclass(frozen=True)
class MarkedDurfeeSymbol:
    """Top and bottom rows of (value, color) pairs, listed with both coordinates non-increasing."""

    top: tuple
    bottom: tuple
    side: int
    marks: int

    @property
    def size(self) -> int:
        return sum(v for v, _ in self.top) + sum(v for v, _ in self.bottom) + self.side ** 2

    def tau(self, i: int) -> int:
        return sum(1 for _, c in self.top if c == i)

    def beta(self, i: int) -> int:
        return sum(1 for _, c in self.bottom if c == i)

    def rho(self, i: int) -> int:
        r = self.tau(i) - self.beta(i)
        return r if i == self.marks else r - 1

    def ranks(self) -> tuple[int, ...]:
        return tuple(self.rho(i) for i in range(1, self.marks + 1))

    @property
    def full_rank(self) -> int:
        return sum(i * r for i, r in enumerate(self.ranks(), start=1))

    def top_maxima(self) -> list[int]:
        """M_1 .. M_{k-1}: largest top-row part of each color below k."""
        return [max((v for v, c in self.top if c == i), default=0) for i in range(1, self.marks)]

    def is_admissible(self) -> bool:
        k, S = self.marks, self.side
        for row in (self.top, self.bottom):
            for (v1, c1), (v2, c2) in zip(row, row[1:]):
                if v2 > v1 or c2 > c1:
                    return False
            if any(not (1 <= v <= S and 1 <= c <= k) for v, c in row):
                return False
        if any(self.tau(i) == 0 for i in range(1, k)):
            return False
        lo, hi = _bottom_bounds(self.top_maxima(), S, k)
        return all(lo[c] <= v <= hi[c] for v, c in self.bottom)

    def __str__(self):
        fmt = lambda row: " ".join(f"{v}_{c}" for v, c in row)  # noqa: E731
        return f"({fmt(self.top)} / {fmt(self.bottom)})_{self.side}"


def _bottom_bounds(maxima: list[int], side: int, k: int):
    lo = {1: 1}
    hi = {}
    edges = [1] + list(maxima) + [side]
    for c in range(1, k + 1):
        lo[c] = edges[c - 1]
        hi[c] = edges[c]
    return lo, hi


def _chains(max_v: int, max_c: int, budget: int, lo=None, hi=None):
    """Rows whose (value, color) pairs are non-increasing in both coordinates, with value sum <= budget."""
    yield ()
    for c in range(max_c, 0, -1):
        vmin = 1 if lo is None else lo[c]
        vmax = min(max_v, budget) if hi is None else min(max_v, budget, hi[c])
        for v in range(vmax, vmin - 1, -1):
            for rest in _chains(v, c, budget - v, lo, hi):
                yield ((v, c),) + rest


def enum_marked_durfee(k: int, n: int | None = None, *, n_max: int | None = None) -> Iterator[MarkedDurfeeSymbol]:
    """k-marked Durfee symbols of size n (or of every size <= n_max)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    exact = n is not None
    top_n = n if exact else n_max
    if top_n is None:
        raise ValueError("give n or n_max")
    S = 1
    while S * S <= top_n:
        room = top_n - S * S
        for top in _chains(S, k, room):
            colors = {c for _, c in top}
            if any(i not in colors for i in range(1, k)):
                continue
            used = sum(v for v, _ in top)
            maxima = [max(v for v, c in top if c == i) for i in range(1, k)]
            lo, hi = _bottom_bounds(maxima, S, k)
            if any(lo[c] > hi[c] for c in range(1, k + 1)):
                continue
            for bottom in _chains(S, k, room - used, lo, hi):
                sym = MarkedDurfeeSymbol(top, bottom, S, k)
                if not exact or sym.size == n:
                    yield sym
        S += 1


@functools.lru_cache(maxsize=None)
def _row_stats(max_v: int, max_c: int, budget: int, k: int, lo: tuple | None, hi: tuple | None, track_max: bool):
    """Counter of (sum, per-color counts, per-color maxima) over the rows produced by ``_chains``.

    Same rows as ``_chains``, grouped by the data the tally needs; the first
    pair of each color in a row carries that color's largest value.
    """
    out: Counter = Counter()
    out[(0, (0,) * (k + 1), (0,) * (k + 1))] = 1
    for c in range(max_c, 0, -1):
        vmin = 1 if lo is None else lo[c]
        vmax = min(max_v, budget) if hi is None else min(max_v, budget, hi[c])
        for v in range(vmax, vmin - 1, -1):
            for (s, counts, maxima), mult in _row_stats(v, c, budget - v, k, lo, hi, track_max).items():
                counts = counts[:c] + (counts[c] + 1,) + counts[c + 1:]
                if track_max:
                    maxima = maxima[:c] + (v,) + maxima[c + 1:]
                out[(s + v, counts, maxima)] += mult
    return dict(out)


@functools.lru_cache(maxsize=16)
def rank_vector_tally(k: int, n_max: int) -> dict:
    """Counter over (n, (rho_1, .., rho_k)) for all k-marked symbols of size 1..n_max.

    Top rows and bottom rows are listed separately (grouped by their
    statistics) and paired by the product rule; this counts exactly the
    symbols that :func:`enum_marked_durfee` yields.
    """
    tally: Counter = Counter()
    S = 1
    while S * S <= n_max:
        room = n_max - S * S
        for (st, tcounts, tmax), tm in _row_stats(S, k, room, k, None, None, True).items():
            if any(tcounts[i] == 0 for i in range(1, k)):
                continue
            lo, hi = _bottom_bounds(list(tmax[1:k]), S, k)
            if any(lo[c] > hi[c] for c in range(1, k + 1)):
                continue
            lo_t = (0,) + tuple(lo[c] for c in range(1, k + 1))
            hi_t = (0,) + tuple(hi[c] for c in range(1, k + 1))
            for (sb, bcounts, _), bm in _row_stats(S, k, room - st, k, lo_t, hi_t, False).items():
                ranks = tuple(tcounts[i] - bcounts[i] - (0 if i == k else 1) for i in range(1, k + 1))
                tally[(S * S + st + sb, ranks)] += tm * bm
        S += 1
    return dict(tally)


def durfee_count(k: int, n: int, n_max: int | None = None) -> int:
    """D_k(n)."""
    tally = rank_vector_tally(k, n_max or n)
    return sum(c for (size, _), c in tally.items() if size == n)


def full_rank_table(k: int, n_max: int) -> dict[int, dict[int, int]]:
    """{n: {m: NF_k(m, n)}} for 1 <= n <= n_max."""
    out: dict[int, Counter] = {n: Counter() for n in range(1, n_max + 1)}
    for (size, ranks), c in rank_vector_tally(k, n_max).items():
        out[size][sum(i * r for i, r in enumerate(ranks, start=1))] += c
    return {n: dict(row) for n, row in out.items()}


def full_rank_residue_table(k: int, t: int, n_max: int) -> dict[int, list[int]]:
    """{n: [NF_k(r, t; n) for r in 0..t-1]}."""
    out = {}
    for n, row in full_rank_table(k, n_max).items():
        counts = [0] * t
        for m, c in row.items():
            counts[m % t] += c
        out[n] = counts
    return out


def durfee_multivariate(k: int, points, n_max: int, ring) -> list:
    """Coefficients 0..n_max of sum D_k(m_1..m_k; n) prod x_i^{m_i} evaluated at ``points``."""
    points = [ring.coerce(x) for x in points]
    out = [ring.zero] * (n_max + 1)
    for (size, ranks), c in rank_vector_tally(k, n_max).items():
        term = ring.coerce(c)
        for x, r in zip(points, ranks):
            term = term * (x ** r)
        out[size] = ring.normalize(out[size] + term)
    return out


# ---------------------------------------------------------------------------
# tables


@dataclass
class StatTable:
    """Counts keyed by (m, n) or, for residue statistics, (r, t, n)."""

    statistic: str
    counts: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["statistic", "n", "m", "count"])
        for key in sorted(self.counts, key=lambda k: (k[-1],) + tuple(k[:-1])):
            m = ":".join(str(x) for x in key[:-1])
            w.writerow([self.statistic, key[-1], m, _fmt(self.counts[key])])
        return buf.getvalue()

    def to_json(self) -> str:
        rows = [{"n": key[-1], "m": list(key[:-1]) if len(key) > 2 else key[0], "count": _fmt(self.counts[key])}
                for key in sorted(self.counts, key=lambda k: (k[-1],) + tuple(k[:-1]))]
        return json.dumps({"statistic": self.statistic, "rows": rows}, indent=1, sort_keys=True)

    @classmethod
    def from_csv(cls, text: str) -> StatTable:
        rows = list(csv.reader(io.StringIO(text)))
        stat = rows[1][0] if len(rows) > 1 else ""
        counts = {}
        for s, n, m, c in rows[1:]:
            key = tuple(int(x) for x in m.split(":")) + (int(n),)
            counts[key] = Fraction(c) if "/" in c else int(c)
        return cls(stat, counts)

    def row_sums(self) -> dict[int, int]:
        out: Counter = Counter()
        for key, c in self.counts.items():
            out[key[-1]] += c
        return dict(out)


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return str(x)


def rank_table(n_max: int) -> StatTable:
    return StatTable("N", {(m, n): c for n in range(1, n_max + 1) for m, c in sorted(rank_row(n).items())})


def crank_table(n_max: int) -> StatTable:
    return StatTable("M", {(m, n): c for n in range(1, n_max + 1) for m, c in sorted(crank_row(n).items())})


def nf_table(k: int, n_max: int, t: int | None = None) -> StatTable:
    if t is None:
        return StatTable(f"NF{k}", {(m, n): c for n, row in full_rank_table(k, n_max).items()
                                    for m, c in row.items()})
    return StatTable(f"NF{k}_t{t}", {(r, t, n): c for n, row in full_rank_residue_table(k, t, n_max).items()
                                     for r, c in enumerate(row)})
