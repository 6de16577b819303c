"""Rank and crank generating functions, their moments, and the identities tying them together."""
from __future__ import annotations

import functools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd, lcm

from quasirank import forms
from quasirank.partitions import eta_weight
from quasirank.qseries import QSeries, WQSeries
from quasirank.rings import QQ, ZZ, CycElement, Ring, Zmod, cyclo_ring


class DegeneratePointsError(ValueError):
    """Evaluation points collide (x_i = x_j or x_i x_j = 1); use durfee_gf_deriv."""


# ---------------------------------------------------------------------------
# polynomials in one variable


@dataclass(frozen=True)
class IntPolynomial:
    """Dense univariate polynomial with Fraction coefficients, lowest degree first."""

    coeffs: tuple = ()

    def __post_init__(self):
        c = [Fraction(x) for x in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def x(cls) -> IntPolynomial:
        return cls((0, 1))

    @classmethod
    def const(cls, c) -> IntPolynomial:
        return cls((c,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return IntPolynomial(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return IntPolynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if not self.coeffs or not other.coeffs:
            return IntPolynomial(())
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = IntPolynomial.const(1)
        for _ in range(e):
            out = out * self
        return out

    def __call__(self, x):
        """Horner evaluation; ``x`` may be a number or another polynomial."""
        acc = IntPolynomial(()) if isinstance(x, IntPolynomial) else 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def reduce_mod(self, m: int) -> tuple[int, ...]:
        ring = Zmod(m)
        out = [ring.coerce(c) for c in self.coeffs]
        while out and out[-1] == 0:
            out.pop()
        return tuple(out)

    def __str__(self):
        terms = [f"{c}*x^{i}" if i else str(c) for i, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) or "0"


def _as_poly(x) -> IntPolynomial:
    return x if isinstance(x, IntPolynomial) else IntPolynomial.const(x)


def apply_delta_poly(poly: IntPolynomial, x: QSeries) -> QSeries:
    """poly(delta_q) applied to x; the result lives over QQ unless poly is integral."""
    ring = x.ring if poly.is_integral() else QQ
    x = x.change_ring(ring) if ring != x.ring else x
    out = QSeries.zero(ring, x.trunc)
    power = x
    for i, c in enumerate(poly.coeffs):
        if i:
            power = power.delta()
        if c:
            out = out + power.scale(ring.coerce(c))
    return out


# ---------------------------------------------------------------------------
# metadata wrapper


@dataclass
class MomentSeries:
    """A q-series plus the statistic it represents."""

    stat: str
    series: QSeries
    params: dict = field(default_factory=dict)

    @property
    def trunc(self) -> int:
        return self.series.trunc

    def __getitem__(self, n):
        return self.series[n]

    def metadata(self) -> dict:
        return {"statistic": self.stat, "params": self.params, "trunc": self.series.trunc,
                "val": self.series.val, "ring": self.series.ring.tag}

    def metadata_json(self) -> str:
        return json.dumps(self.metadata(), indent=1, sort_keys=True)

    def save(self, path: str) -> None:
        """Write ``path`` (series text) and ``path + '.json'`` (metadata)."""
        with open(path, "w") as fh:
            fh.write(self.series.to_text())
        with open(path + ".json", "w") as fh:
            fh.write(self.metadata_json() + "\n")

    @classmethod
    def load(cls, path: str) -> MomentSeries:
        with open(path) as fh:
            series = QSeries.from_text(fh.read())
        with open(path + ".json") as fh:
            meta = json.load(fh)
        return cls(meta["statistic"], series, meta.get("params", {}))


# ---------------------------------------------------------------------------
# rank and crank generating functions


def _shift_rows(x: WQSeries, s: int) -> WQSeries:
    return WQSeries(x.ring, [{}] * s + list(x.rows), x.trunc)


def rank_gf_hyper(T: int, ring: Ring = ZZ) -> WQSeries:
    """1 + sum_{n>=1} q^(n^2) / ((wq; q)_n (w^-1 q; q)_n) through q^T."""
    total = WQSeries.constant(ring, T)
    term = WQSeries.constant(ring, T)
    n = 1
    while n * n <= T:
        term = _shift_rows(term, 2 * n - 1).div_one_minus(1, n).div_one_minus(-1, n)
        total = total + term
        n += 1
    return total


def lambert_numerator(T: int, ring: Ring = ZZ) -> WQSeries:
    """(1 - w) sum_n (-1)^n q^(n(3n+1)/2) / (1 - w q^n), expanded in q with n = 0 read as 1."""
    rows: list[dict] = [dict() for _ in range(T + 1)]

    def bump(n, m, c):
        rows[n][m] = rows[n].get(m, 0) + c

    bump(0, 0, 1)
    n = 1
    while n * (3 * n - 1) // 2 <= T:
        sign = -1 if n % 2 else 1
        e = n * (3 * n + 1) // 2
        j = 0
        while e + n * j <= T:
            bump(e + n * j, j, sign)
            bump(e + n * j, j + 1, -sign)
            j += 1
        # n -> -n: (1-w)/(1 - w q^-n) = -(1-w) sum_{j>=1} w^-j q^(nj)
        e = n * (3 * n - 1) // 2
        j = 1
        while e + n * j <= T:
            bump(e + n * j, -j, -sign)
            bump(e + n * j, 1 - j, sign)
            j += 1
        n += 1
    return WQSeries(ring, [{m: ring.coerce(c) for m, c in r.items()} for r in rows], T)


def lambert_weighted_numerator(weight, T: int, ring: Ring) -> QSeries:
    """Row-wise sum_m weight(m) * coeff of :func:`lambert_numerator`, without building the rows."""
    vals = {}

    def f(m):
        if m not in vals:
            vals[m] = ring.coerce(weight(m))
        return vals[m]

    out = [ring.zero] * (T + 1)
    out[0] = f(0)
    n = 1
    while n * (3 * n - 1) // 2 <= T:
        sign = -1 if n % 2 else 1
        e = n * (3 * n + 1) // 2
        j = 0
        while e + n * j <= T:
            d = f(j) - f(j + 1)
            out[e + n * j] = out[e + n * j] + (d if sign > 0 else -d)
            j += 1
        e = n * (3 * n - 1) // 2
        j = 1
        while e + n * j <= T:
            d = f(1 - j) - f(-j)
            out[e + n * j] = out[e + n * j] + (d if sign > 0 else -d)
            j += 1
        n += 1
    return QSeries(ring, 0, [ring.normalize(c) for c in out], T, raw=True)


def rank_gf_lambert(T: int, ring: Ring = ZZ) -> WQSeries:
    """Lambert-series form of R(w; q) through q^T."""
    return lambert_numerator(T, ring) * forms.partition_series(T, ring)


def crank_gf(T: int, ring: Ring = ZZ) -> WQSeries:
    """prod (1 - q^n) / ((1 - w q^n)(1 - w^-1 q^n)) through q^T."""
    out = WQSeries.from_qseries(forms.euler_product(T, ring))
    for n in range(1, T + 1):
        out = out.div_one_minus(1, n).div_one_minus(-1, n)
    return out


def crank_cubed(T: int, ring: Ring = ZZ) -> WQSeries:
    """(q;q)^2 C(w;q)^3 = (q;q)^5 / prod ((1 - w q^n)(1 - w^-1 q^n))^3."""
    out = WQSeries.from_qseries(forms.euler_product(T, ring) ** 5)
    for n in range(1, T + 1):
        for _ in range(3):
            out = out.div_one_minus(1, n).div_one_minus(-1, n)
    return out


# ---------------------------------------------------------------------------
# moment series


def _rank_weighted(weight, T: int, ring: Ring) -> QSeries:
    return lambert_weighted_numerator(weight, T, ring) * forms.partition_series(T, ring)


def _to_zz_if_integral(x: QSeries) -> QSeries:
    if x.ring == QQ and all(Fraction(c).denominator == 1 for c in x.coeffs):
        return x.change_ring(ZZ)
    return x


@functools.lru_cache(maxsize=128)
def rank_moment_series(j: int, T: int) -> QSeries:
    """sum_{n>=1} N_j(n) q^n (the n = 0 term is dropped)."""
    s = _rank_weighted(lambda m: m ** j, T, ZZ)
    return _drop_constant(s)


def _drop_constant(s: QSeries) -> QSeries:
    if s.val > 0 or s[0] == 0:
        return s
    return s - QSeries.constant(s[0], s.ring, s.trunc)


@functools.lru_cache(maxsize=128)
def eta_moment_series(k: int, T: int) -> QSeries:
    """sum_{n>=1} eta_k(n) q^n, i.e. the series R_{k/2+1}(q) for even k."""
    s = _rank_weighted(lambda m: eta_weight(m, k), T, QQ)
    return _to_zz_if_integral(_drop_constant(s))


@functools.lru_cache(maxsize=128)
def crank_moment_recurrence(a: int, T: int) -> QSeries:
    """C_a from the Atkin-Garvan recurrence; C_0 is the full partition series P."""
    P = forms.partition_series(T)
    if a == 0:
        return P
    if a % 2:
        return QSeries.zero(ZZ, T)
    out = (forms.eisenstein_phi(a - 1, T) * P).scale(2)
    for j in range(1, a // 2):
        term = forms.eisenstein_phi(2 * j - 1, T) * crank_moment_recurrence(a - 2 * j, T)
        out = out + term.scale(2 * comb(a - 1, 2 * j - 1))
    return out.truncate(T)


@functools.lru_cache(maxsize=32)
def _crank_gf_cached(T: int) -> WQSeries:
    return crank_gf(T)


@functools.lru_cache(maxsize=32)
def _rank_gf_cached(T: int) -> WQSeries:
    return rank_gf_lambert(T)


def crank_moment_series(a: int, T: int, method: str = "recurrence") -> QSeries:
    """C_a; ``method`` is "recurrence" or "delta_w" (row-wise moment of the bivariate product)."""
    if method == "recurrence":
        return crank_moment_recurrence(a, T)
    if method == "delta_w":
        return _crank_gf_cached(T).moment(a)
    raise ValueError(f"unknown method {method!r}")


def moment_series(kind: str, order: int, T: int, *, method: str | None = None,
                  checked: bool = False, oracle_n: int = 20) -> MomentSeries:
    """Moment generating series.

    kind "C": C_order; kind "R": the rank moment series with N_order(n);
    kind "Rk": R_{order}(q) = sum eta_{2 order - 2}(n) q^n.
    With ``checked`` the leading coefficients are compared with enumeration.
    """
    if kind == "C":
        method = method or "recurrence"
        s = crank_moment_series(order, T, method)
        stat = f"C_{order}"
    elif kind == "R":
        method = method or "lambert"
        if method == "lambert":
            s = rank_moment_series(order, T)
        elif method == "hyper":
            s = _drop_constant(rank_gf_hyper(T).moment(order)) if order else rank_gf_hyper(T).moment(0)
        else:
            raise ValueError(f"unknown method {method!r}")
        stat = f"Rmom_{order}"
    elif kind == "Rk":
        if order < 1:
            raise ValueError("R_k needs k >= 1")
        s = eta_moment_series(2 * order - 2, T) if order > 1 else forms.partition_series(T)
        stat = f"R_{order}"
    else:
        raise ValueError(f"unknown moment kind {kind!r}")
    ms = MomentSeries(stat, s, {"kind": kind, "order": order, "method": method})
    if checked:
        check_against_oracle(ms, min(oracle_n, T))
    return ms


def check_against_oracle(ms: MomentSeries, n_max: int) -> None:
    """Raise AssertionError if the series disagrees with enumeration on 1..n_max."""
    from quasirank import partitions

    kind, order = ms.params["kind"], ms.params["order"]
    for n in range(1, n_max + 1):
        if kind == "C":
            want = partitions.crank_moment(order, n)
        elif kind == "R":
            want = partitions.rank_moment(order, n)
        else:
            want = partitions.eta_moment(2 * order - 2, n) if order > 1 else sum(partitions.rank_row(n).values())
        if ms.series[n] != want:
            raise AssertionError(f"{ms.stat}: coefficient {n} is {ms.series[n]}, enumeration gives {want}")


# ---------------------------------------------------------------------------
# rank-crank PDE and moment identities


def pde_residual(T: int) -> WQSeries:
    """w (q;q)^2 C^3 - (3(1-w)^2 d_q + (1/2)(1-w)^2 d_w^2 - (1/2)(w^2-1) d_w + w) R over QQ."""
    R = rank_gf_lambert(T)
    lhs2 = crank_cubed(T).mul_wpoly({1: 2})
    one_minus_w_sq = {0: 1, 1: -2, 2: 1}
    rhs2 = (R.delta_q().mul_wpoly(one_minus_w_sq).scale(6)
            + R.delta_w().delta_w().mul_wpoly(one_minus_w_sq)
            - R.delta_w().mul_wpoly({2: 1, 0: -1})
            + R.mul_wpoly({1: 2}))
    return (lhs2 - rhs2).change_ring(QQ).scale(Fraction(1, 2))


def _crank_family(a: int, T: int, method: str) -> dict[int, QSeries]:
    return {b: crank_moment_series(b, T, method).change_ring(QQ) for b in range(0, a + 1, 2)}


def _even_triples(total: int):
    for al in range(0, total + 1, 2):
        for be in range(0, total - al + 1, 2):
            yield al, be, total - al - be


def _multinomial(n: int, *ks: int) -> int:
    out = 1
    rest = n
    for k in ks:
        out *= comb(rest, k)
        rest -= k
    return out


def y_series(k: int, T: int, crank_method: str = "recurrence") -> MomentSeries:
    """Y_{2k}: left side of the moment identity with a = 2k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    a = 2 * k
    C = _crank_family(a, T, crank_method)
    P = C[0]
    Pm2 = (P * P).invert()
    cubic: dict[tuple, QSeries] = {}
    acc = QSeries.zero(QQ, T)
    for i in range(k):
        inner = QSeries.zero(QQ, T)
        for al, be, ga in _even_triples(a - 2 * i):
            key = tuple(sorted((al, be, ga)))
            if key not in cubic:
                cubic[key] = C[key[0]] * C[key[1]] * C[key[2]]
            inner = inner + cubic[key].scale(_multinomial(a - 2 * i, al, be, ga))
        acc = acc + inner.scale(comb(a, 2 * i))
    y = (acc * Pm2).truncate(T) - C[2].scale(3 * (2 ** (a - 1) - 1))
    return MomentSeries(f"Y_{a}", _to_zz_if_integral(y), {"k": k})


def _rrec_coeffs(a: int, i: int) -> tuple[int, int]:
    """(delta_q coefficient, plain coefficient) of R_{a-2i} on the right of the moment identity."""
    d = 6 * comb(a, 2 * i) * (2 ** (2 * i - 1) - 1)
    p = comb(a, 2 * i + 2) * (2 ** (2 * i + 1) - 1) - 2 ** (2 * i) * comb(a, 2 * i + 1) + comb(a, 2 * i)
    return d, p


def rankcrank_rhs(a: int, T: int) -> QSeries:
    R = {b: rank_moment_series(b, T).change_ring(QQ) for b in range(2, a + 1, 2)}
    out = R[a].scale(Fraction((a - 1) * (a - 2), 2))
    for i in range(1, a // 2):
        d, p = _rrec_coeffs(a, i)
        out = out + R[a - 2 * i].delta().scale(d) + R[a - 2 * i].scale(p)
    return out


def rankcrank_residual(a: int, T: int, crank_method: str = "recurrence") -> QSeries:
    """Left minus right side of the moment identity for even a >= 2."""
    if a < 2 or a % 2:
        raise ValueError("a must be even and >= 2")
    lhs = y_series(a // 2, T, crank_method).series.change_ring(QQ)
    return lhs - rankcrank_rhs(a, T)


def display_r4_residual(T: int) -> QSeries:
    """3 R_4 - (-2(3 d_q + 1) C_2 + 8 C_4 + 3(-12 d_q + 1) R_2)."""
    R2, R4 = rank_moment_series(2, T), rank_moment_series(4, T)
    C2, C4 = crank_moment_recurrence(2, T), crank_moment_recurrence(4, T)
    rhs = -(C2.delta().scale(3) + C2).scale(2) + C4.scale(8) + (R2 - R2.delta().scale(12)).scale(3)
    return R4.scale(3) - rhs


@functools.lru_cache(maxsize=64)
def _solve_r2k_cached(k: int, T: int) -> QSeries:
    if k == 1:
        return rank_moment_series(2, T).change_ring(QQ)
    a = 2 * k
    y = y_series(k, T).series.change_ring(QQ)
    acc = QSeries.zero(QQ, T)
    for i in range(1, k):
        d, p = _rrec_coeffs(a, i)
        lower = _solve_r2k_cached(k - i, T)
        acc = acc + lower.delta().scale(d) + lower.scale(p)
    return (y - acc).scale(Fraction(1, (2 * k - 1) * (k - 1)))


def solve_R2k(k: int, T: int) -> MomentSeries:
    """The rank moment series of order 2k from the crank side and the order-2 rank series alone."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return MomentSeries(f"Rmom_{2 * k}", _to_zz_if_integral(_solve_r2k_cached(k, T)),
                        {"kind": "R", "order": 2 * k, "method": "recurrence"})


# ---------------------------------------------------------------------------
# P_k and V_k


@functools.lru_cache(maxsize=None)
def pk_poly(k: int, method: str = "recurrence") -> IntPolynomial:
    """P_k(x) by "recurrence", "explicit" (binomial sum) or "rrec" (read off the solver)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    x = IntPolynomial.x()
    if method == "recurrence":
        if k == 0:
            return IntPolynomial(())
        if k == 1:
            return IntPolynomial.const(1)
        return (1 - 12 * x) * pk_poly(k - 1) - 36 * x * x * pk_poly(k - 2)
    if method == "explicit":
        if k == 0:
            return IntPolynomial(())
        u = 1 - 24 * x
        total = sum((comb(2 * k, 2 * j + 1) * u ** j for j in range(k)), IntPolynomial(()))
        return total * Fraction(1, 2 ** (2 * k - 1))
    if method == "rrec":
        if k <= 1:
            return IntPolynomial.const(k)
        total = IntPolynomial(())
        for i in range(1, k):
            d, p = _rrec_coeffs(2 * k, i)
            total = total + (d * x + p) * pk_poly(k - i, "rrec")
        return total * Fraction(-1, (2 * k - 1) * (k - 1))
    raise ValueError(f"unknown method {method!r}")


def vk_poly(k: int) -> IntPolynomial:
    """V_k(z) = P_k((1 - z^2) / 24)."""
    z = IntPolynomial.x()
    return pk_poly(k)((1 - z * z) * Fraction(1, 24))


def vk_identity_holds(k: int) -> bool:
    """z V_k(z) == ((1+z)/2)^(2k) - ((1-z)/2)^(2k) as polynomials."""
    z = IntPolynomial.x()
    half = Fraction(1, 2)
    rhs = ((1 + z) * half) ** (2 * k) - ((1 - z) * half) ** (2 * k)
    return z * vk_poly(k) == rhs


def pcong_check(ell: int) -> bool:
    """P_{(ell+1)/2} == ((ell+1)/2)(1 + (1-24x)^((ell-1)/2)) modulo ell."""
    from quasirank.rings import is_prime

    if ell <= 3 or not is_prime(ell):
        raise ValueError("need a prime ell > 3")
    x = IntPolynomial.x()
    lhs = pk_poly((ell + 1) // 2)
    rhs = Fraction(ell + 1, 2) * (1 + (1 - 24 * x) ** ((ell - 1) // 2))
    return lhs.reduce_mod(ell) == rhs.reduce_mod(ell)


def quasimodular_witness(kind: str, k: int, check_to: int | None = None) -> forms.QuasimodularFit:
    """Fit C_2k / P ("C") or (R_2k - P_k(delta_q) R_2) / P ("R") in E2, E4, E6 up to weight 2k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if check_to is None:
        check_to = 4 * len(forms.quasimodular_monomials(2 * k))
    T = check_to
    P = forms.partition_series(T, QQ)
    if kind == "C":
        top = crank_moment_series(2 * k, T).change_ring(QQ)
    elif kind == "R":
        r2 = rank_moment_series(2, T).change_ring(QQ)
        top = rank_moment_series(2 * k, T).change_ring(QQ) - apply_delta_poly(pk_poly(k), r2)
    else:
        raise ValueError("kind must be 'C' or 'R'")
    return forms.quasimodular_fit(top / P, 2 * k, check_to)


# ---------------------------------------------------------------------------
# marked Durfee generating functions at points


def _rank_at(points, T: int, ring: Ring) -> list[QSeries]:
    R = _rank_gf_cached(T)
    return [R.weighted(lambda m, x=x: x ** m, ring) for x in points]


def _ring_of(points) -> Ring:
    for x in points:
        if isinstance(x, CycElement):
            return x.ring
    return QQ


def durfee_gf_eval(points, T: int) -> QSeries:
    """R_k(x_1, .., x_k; q) as a combination of R(x_i; q)."""
    ring = _ring_of(points)
    pts = [ring.coerce(x) for x in points]
    k = len(pts)
    for i in range(k):
        for j in range(k):
            if (i != j and pts[i] == pts[j]) or ring.is_zero(pts[i] * pts[j] - ring.one):
                raise DegeneratePointsError("points must be distinct with x_i x_j != 1; see durfee_gf_deriv")
    rs = _rank_at(pts, T, ring)
    out = QSeries.zero(ring, T)
    for i in range(k):
        den = ring.one
        for j in range(k):
            if j != i:
                den = den * (pts[i] - pts[j]) * (ring.one - ring.inv(pts[i] * pts[j]))
        out = out + rs[i].scale(ring.inv(den))
    return out


def durfee_gf_deriv(x, T: int) -> QSeries:
    """R_2(x, x; q) = [d/dy R(y; q)]_{y=x} / (1 - x^-2)."""
    ring = _ring_of([x])
    x = ring.coerce(x)
    if ring.is_zero(x * x - ring.one):
        raise DegeneratePointsError("x^2 = 1 is not allowed")
    xinv = ring.inv(x)
    deriv = _rank_gf_cached(T).weighted(lambda m: (x ** m) * xinv * m, ring)
    return deriv.scale(ring.inv(ring.one - xinv * xinv))


def rootunity_eval(k: int, t: int, j: int, T: int, *, literal: bool = False) -> QSeries:
    """R_k(zeta_t^j; q) via the partial-fraction formula at x_l = zeta_t^(jl).

    ``literal=True`` transcribes the printed denominator factors
    (zeta^(jm) - zeta^(jl)), which differ from the general formula by the
    sign (-1)^(k-1); the default uses the general formula.
    """
    ring = cyclo_ring(t)
    pts = [ring.root_power(j * l) for l in range(1, k + 1)]
    out = durfee_gf_eval(pts, T)
    if literal and (k - 1) % 2:
        out = -out
    return out


def full_rank_gf_at_root(k: int, t: int, j: int, T: int) -> QSeries:
    """R_k(zeta_t^j; q) = sum NF_k(m, n) zeta^(jm) q^n, by whichever exact route applies."""
    ring = cyclo_ring(t)
    if j % t == 0:
        s = moment_series("Rk", k, T).series
        return s.change_ring(ring)
    pts = [ring.root_power(j * l) for l in range(1, k + 1)]
    try:
        return durfee_gf_eval(pts, T)
    except DegeneratePointsError:
        pass
    if k == 2 and pts[0] == pts[1]:
        return durfee_gf_deriv(pts[0], T)
    from quasirank.partitions import durfee_multivariate

    return QSeries(ring, 0, durfee_multivariate(k, pts, T, ring), T)


# ---------------------------------------------------------------------------
# twisted series


def _geom_sum_terms(zeta, T: int, ring: Ring, start_exp: int, n: int, squared: bool, sign: int, out: list):
    """Add sign * q^start_exp / (1 - zeta q^n) or its square, expanded in q, into ``out`` (n != 0)."""
    if n > 0:
        j = 0
        while start_exp + n * j <= T:
            c = zeta ** j
            if squared:
                c = c * (j + 1)
            e = start_exp + n * j
            if e >= 0:
                out[e] = out[e] + (c if sign > 0 else -c)
            j += 1
    else:
        m = -n
        j = 1 if not squared else 2
        while start_exp + m * j <= T:
            c = zeta ** (-j)
            c = -c if not squared else c * (j - 1)
            e = start_exp + m * j
            out[e] = out[e] + (c if sign > 0 else -c)
            j += 1


def twisted_lambert_sums(a: int, c: int, T: int) -> tuple[QSeries, QSeries]:
    """S1 = sum (-1)^(n+1) q^(n(3n+1)/2)/(1 - zeta q^n) and S2 with q^(3n(n+1)/2)/(1 - zeta q^n)^2, zeta = zeta_c^a.

    Both over the conductor-2c cyclotomic field; neither is divided by (q;q)_inf.
    """
    if not 0 < a < c or gcd(a, c) != 1:
        raise ValueError("need coprime 0 < a < c")
    ring = cyclo_ring(2 * c)
    zeta = ring.root_power(2 * a)
    s1 = [ring.zero] * (T + 1)
    s2 = [ring.zero] * (T + 1)
    one_minus = ring.one - zeta
    s1[0] = -ring.inv(one_minus)
    s2[0] = -ring.inv(one_minus * one_minus)
    n = 1
    while True:
        hit = False
        for nn in (n, -n):
            sign = 1 if nn % 2 else -1  # (-1)^(n+1)
            e1 = nn * (3 * nn + 1) // 2
            e2 = 3 * nn * (nn + 1) // 2
            if e1 <= T or (nn < 0 and e1 + (-nn) <= T):
                _geom_sum_terms(zeta, T, ring, e1, nn, False, sign, s1)
                hit = True
            if e2 <= T or (nn < 0 and e2 + 2 * (-nn) <= T):
                _geom_sum_terms(zeta, T, ring, e2, nn, True, sign, s2)
                hit = True
        if not hit:
            break
        n += 1
    return (QSeries(ring, 0, [ring.normalize(x) for x in s1], T, raw=True),
            QSeries(ring, 0, [ring.normalize(x) for x in s2], T, raw=True))


def twisted_r2(a: int, c: int, T: int) -> QSeries:
    """R_2(a/c; q) = zeta_2c^a/(2 (q;q)) S1 + zeta_2c^(3a)/(q;q) S2."""
    s1, s2 = twisted_lambert_sums(a, c, T)
    ring = s1.ring
    P = forms.partition_series(T).change_ring(ring)
    pref1 = ring.root_power(a) * Fraction(1, 2)
    pref3 = ring.root_power(3 * a)
    return (s1.scale(pref1) + s2.scale(pref3)) * P


def rank_derivative_at(a: int, c: int, T: int) -> QSeries:
    """[d/dw R(w; q)]_{w = zeta_c^a} row-wise from the bivariate series, over the conductor-2c field."""
    ring = cyclo_ring(2 * c)
    zeta = ring.root_power(2 * a)
    zinv = ring.inv(zeta)
    return _rank_gf_cached(T).weighted(lambda m: (zeta ** m) * zinv * m, ring)


def rank_derivative_from_sums(a: int, c: int, T: int, *, paper_factor: bool = False) -> QSeries:
    """(S1 - (1 - zeta) S2)/(q;q); with ``paper_factor`` the second term carries an extra zeta."""
    s1, s2 = twisted_lambert_sums(a, c, T)
    ring = s1.ring
    zeta = ring.root_power(2 * a)
    f = ring.one - zeta
    if paper_factor:
        f = zeta * f
    P = forms.partition_series(T).change_ring(ring)
    return (s1 - s2.scale(f)) * P


def twisted_eisenstein(j: int, a: int, c: int, T: int) -> QSeries:
    """sum_{n>=1} (sum_{d|n} d^j (zeta^(ad) - (-1)^j zeta^(-ad))) q^n, zeta = zeta_c."""
    if j < 1:
        raise ValueError("j must be >= 1")
    ring = cyclo_ring(c)
    out = [ring.zero] * (T + 1)
    sgn = -1 if j % 2 else 1
    for d in range(1, T + 1):
        coef = (ring.root_power(a * d) - ring.root_power(-a * d) * sgn) * (d ** j)
        for n in range(d, T + 1, d):
            out[n] = out[n] + coef
    return QSeries(ring, 0, out, T)


def twisted_eisenstein_double_sum(j: int, a: int, c: int, T: int) -> QSeries:
    """[delta_w^j L(w; q)]_{w = zeta_c^a} summed over (n, m) directly."""
    ring = cyclo_ring(c)
    out = [ring.zero] * (T + 1)
    for n in range(1, T + 1):
        for m in range(1, T // n + 1):
            out[n * m] = out[n * m] + ring.root_power(a * m) * (m ** j) - ring.root_power(-a * m) * ((-m) ** j)
    return QSeries(ring, 0, out, T)


def twisted_moment_series(kind: str, j: int, a: int, c: int, T: int) -> MomentSeries:
    """sum_n (sum_k k^j zeta_c^(ak) N(k, n)) q^n, or with M(k, n) for kind "C"."""
    if not 0 < a < c:
        raise ValueError("need 0 < a < c")
    ring = cyclo_ring(c)

    def weight(m):
        return ring.root_power(a * m) * (m ** j)

    if kind == "R":
        s = _rank_weighted(weight, T, ring)
        if j == 0:
            pass
        else:
            s = _drop_constant(s)
    elif kind == "C":
        s = _crank_gf_cached(T).weighted(weight, ring)
    else:
        raise ValueError("kind must be 'R' or 'C'")
    return MomentSeries(f"{kind}_{j},{a},{c}", s, {"kind": kind, "j": j, "a": a, "c": c})


def s_index(a: int, c: int) -> int:
    x = Fraction(a, c)
    if x in (0, Fraction(1, 6), Fraction(1, 2), Fraction(5, 6)) or not 0 < x < 1:
        raise ValueError(f"s(a, c) undefined at a/c = {x}")
    if x < Fraction(1, 6):
        return 0
    if x < Fraction(1, 2):
        return 1
    if x < Fraction(5, 6):
        return 2
    return 3


def t2_series(a: int, c: int, T: int) -> MomentSeries:
    """T_2(a/c; q) in the variable Q = q^(1/L), L = lcm(2c, 24), through q^T (Q^(L T)).

    Coefficients are rational because of the factor s - 3a/c.
    """
    s = s_index(a, c)
    L = lcm(2 * c, 24)
    top = L * T
    u = L // c  # Q-exponent of q^(1/c)
    half = L // (2 * c)
    terms: dict[int, Fraction] = {}

    def add(e, v):
        if e <= top:
            terms[e] = terms.get(e, 0) + v

    k1 = Fraction(s) - Fraction(3 * a, c)
    # first sum: (s - 3a/c) q^(a/2c) sum (-1)^m q^(m(3m+1)/2 + ms) / (1 - q^(m + a/c))
    # second sum: q^(3a/2c) sum (-1)^m q^(3m(m+1)/2 + ms) / (1 - q^(m + a/c))^2
    M = 0
    while True:
        firsts = []
        for m in ((M,) if M == 0 else (M, -M)):
            sign = -1 if m % 2 else 1
            step = L * m + a * u  # Q-exponent of q^(m + a/c)
            base1 = L * (m * (3 * m + 1) // 2 + m * s) + a * half
            base2 = L * (3 * m * (m + 1) // 2 + m * s) + 3 * a * half
            for base, sq, coef in ((base1, False, k1), (base2, True, Fraction(1))):
                if step > 0:
                    j = 0
                else:
                    j = 2 if sq else 1
                firsts.append(base + abs(step) * j)
                while base + abs(step) * j <= top:
                    if step > 0:
                        add(base + step * j, sign * coef * (j + 1 if sq else 1))
                    else:
                        add(base - step * j, sign * coef * (j - 1 if sq else -1))
                    j += 1
        if M > 0 and min(firsts) > top:
            break
        M += 1
    val = min(min(terms) if terms else 0, 0)
    num = QSeries.from_dict(terms, QQ, top, val=val)
    P = forms.partition_series(T + (-val) // L + 1).change_ring(QQ).rescale(L)
    series = (num * P).truncate(top)
    return MomentSeries(f"T2_{a}/{c}", series, {"a": a, "c": c, "s": s, "exponent_scale": L})
