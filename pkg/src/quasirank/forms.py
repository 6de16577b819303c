"""Classical q-series building blocks and coefficient-stream operators.

Products (q^a; q)_n, eta quotients, Eisenstein series, the partition
generating function, Hecke-type operators, and exact fitting of a series
against polynomials in E2, E4, E6.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction

from quasirank import linalg
from quasirank.qseries import QSeries
from quasirank.rings import QQ, ZZ, Ring, bernoulli, is_prime, legendre


class NotInClassError(ValueError):
    """The target series is not in the span of the requested basis."""


# ---------------------------------------------------------------------------
# products


def pochhammer(a_exp: int, n: int | None, trunc: int, ring: Ring = ZZ) -> QSeries:
    """(q^a; q)_n by direct multiplication; ``n=None`` means the infinite product."""
    if n is None:
        if a_exp < 1:
            raise ValueError("infinite product (q^a; q)_inf needs a >= 1")
        exps = range(a_exp, trunc + 1)
    else:
        if n < 0:
            raise ValueError("product length must be >= 0")
        exps = range(a_exp, a_exp + n)
    poly = {0: 1}
    for e in exps:
        new = dict(poly)
        for k, c in poly.items():
            new[k + e] = new.get(k + e, 0) - c
        poly = {k: c for k, c in new.items() if c and k <= trunc}
    return QSeries.from_dict(poly, ring, trunc, val=min(0, min(poly, default=0)))


@functools.lru_cache(maxsize=64)
def _euler_coeffs(n: int) -> tuple[int, ...]:
    # pentagonal number theorem
    out = [0] * (n + 1)
    out[0] = 1
    k = 1
    while True:
        hit = False
        for e in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2):
            if e <= n:
                out[e] += -1 if k % 2 else 1
                hit = True
        if not hit:
            break
        k += 1
    return tuple(out)


def euler_product(trunc: int, ring: Ring = ZZ) -> QSeries:
    """(q; q)_inf through q^trunc."""
    return QSeries(ring, 0, _euler_coeffs(max(trunc, 0)), trunc)


def _power_unit_series(e: tuple[int, ...], r: int, n: int) -> list[int]:
    """Coefficients 0..n of E^r for an integer series E with E[0] = 1 (J.C.P. Miller)."""
    nz = [(k, c) for k, c in enumerate(e[: n + 1]) if k and c]
    g = [1]
    for m in range(1, n + 1):
        s = 0
        for k, c in nz:
            if k > m:
                break
            s += ((r + 1) * k - m) * c * g[m - k]
        q, rem = divmod(s, m)
        if rem:
            raise ArithmeticError("non-integral power coefficient")
        g.append(q)
    return g


@functools.lru_cache(maxsize=256)
def _euler_power(r: int, n: int) -> tuple[int, ...]:
    return tuple(_power_unit_series(_euler_coeffs(n), r, n))


def eta_power(r: int, scale: int, trunc: int, ring: Ring = ZZ) -> QSeries:
    """eta(scale*z)^r = q^(r*scale/24) prod (1 - q^(scale n))^r; the valuation must be integral."""
    if scale < 1:
        raise ValueError("scale must be positive")
    if (r * scale) % 24:
        raise ValueError(f"eta({scale}z)^{r} has fractional valuation {r * scale}/24")
    v = r * scale // 24
    if trunc < v:
        return QSeries(ring, v, [], trunc)
    n = (trunc - v) // scale
    base = QSeries(ZZ, 0, _euler_power(r, n), n)
    out = base.rescale(scale).shift(v).truncate(trunc)
    return out if ring == ZZ else out.change_ring(ring)


def discriminant(trunc: int, ring: Ring = ZZ) -> QSeries:
    """Delta = eta(z)^24 = q - 24 q^2 + 252 q^3 - ..."""
    return eta_power(24, 1, trunc, ring)


def partition_series(trunc: int, ring: Ring = ZZ) -> QSeries:
    """P(q) = sum p(n) q^n = 1 / (q; q)_inf."""
    return euler_product(trunc, ring).invert()


@functools.lru_cache(maxsize=32)
def partition_numbers(n: int) -> tuple[int, ...]:
    return partition_series(n).coeffs


# ---------------------------------------------------------------------------
# Eisenstein series


@functools.lru_cache(maxsize=64)
def _sigma_table(j: int, n: int) -> tuple[int, ...]:
    out = [0] * (n + 1)
    for d in range(1, n + 1):
        p = d ** j
        for m in range(d, n + 1, d):
            out[m] += p
    return tuple(out)


def divisor_sigma(j: int, n: int) -> int:
    return sum(d ** j for d in range(1, n + 1) if n % d == 0)


def eisenstein_phi(j: int, trunc: int, ring: Ring = ZZ) -> QSeries:
    """Phi_j = sum_{n>=1} sigma_j(n) q^n (constant term 0)."""
    if j < 1 or j % 2 == 0:
        raise ValueError("Phi_j is defined here for odd j >= 1")
    return QSeries(ring, 0, _sigma_table(j, max(trunc, 0)), trunc)


def eisenstein_E(j: int, trunc: int, ring: Ring = QQ) -> QSeries:
    """E_j = 1 - (2j / B_j) Phi_{j-1}."""
    if j < 2 or j % 2:
        raise ValueError("E_j needs even j >= 2")
    factor = -Fraction(2 * j) / bernoulli(j)
    coeffs = [factor * s for s in _sigma_table(j - 1, max(trunc, 0))]
    coeffs[0] = Fraction(1)
    return QSeries(ring, 0, coeffs, trunc)


# ---------------------------------------------------------------------------
# coefficient-stream operators


def u_operator(x: QSeries, ell: int) -> QSeries:
    """U(ell): a(n) -> a(ell n)."""
    return x.extract_progression(ell, 0)


def t_operator(x: QSeries, ell: int, weight: int) -> QSeries:
    """Hecke T(ell) on a level 1 form of the given weight: a(ell n) + ell^(k-1) a(n / ell)."""
    if x.val < 0:
        raise ValueError("T(ell) needs a series without negative powers")
    ring = x.ring
    top = x.trunc // ell
    c = ring.coerce(ell ** (weight - 1))
    out = []
    for n in range(0, top + 1):
        a = x[ell * n]
        if n % ell == 0:
            a = ring.normalize(a + c * x[n // ell])
        out.append(a)
    return QSeries(ring, 0, out, top, raw=True)


def u_star(x: QSeries, eps: int, ell: int) -> QSeries:
    """Keep a(n) exactly when ((1 - 24n) / ell) = eps."""
    if ell <= 3 or not is_prime(ell):
        raise ValueError("U* needs a prime ell > 3")
    if eps not in (-1, 0, 1):
        raise ValueError("eps must be -1, 0 or 1")
    zero = x.ring.zero
    return QSeries(x.ring, x.val, [c if legendre(1 - 24 * n, ell) == eps else zero for n, c in x.items()],
                   x.trunc, raw=True)


def product_coefficient(x: QSeries, y: QSeries, n: int):
    """Coefficient of q^n in x*y without forming the whole product."""
    ring = x.ring
    s = ring.zero
    lo = x.val
    hi = n - y.val
    if n > min(x.trunc + y._lower(), y.trunc + x._lower()):
        from quasirank.qseries import PrecisionError

        raise PrecisionError(f"q^{n} not determined by the factors")
    for i in range(lo, hi + 1):
        if i > x.trunc:
            break
        a = x[i]
        if a:
            s = s + a * y[n - i]
    return ring.normalize(s)


# ---------------------------------------------------------------------------
# fitting against E2, E4, E6


class _EisensteinPowers:
    """Cache of E2^a E4^b E6^c through a fixed order, over QQ."""

    def __init__(self, trunc: int, ring: Ring = QQ):
        self.trunc = trunc
        self.ring = ring
        self.gens = {j: eisenstein_E(j, trunc).change_ring(ring) for j in (2, 4, 6)}
        self.cache: dict[tuple[int, int, int], QSeries] = {(0, 0, 0): QSeries.constant(1, ring, trunc)}

    def monomial(self, a: int, b: int, c: int) -> QSeries:
        key = (a, b, c)
        if key not in self.cache:
            if a:
                prev, g = self.monomial(a - 1, b, c), self.gens[2]
            elif b:
                prev, g = self.monomial(a, b - 1, c), self.gens[4]
            else:
                prev, g = self.monomial(a, b, c - 1), self.gens[6]
            self.cache[key] = prev * g
        return self.cache[key]


def quasimodular_monomials(max_weight: int, e2_free: bool = False, exact_weight: bool = False):
    """Exponent triples (a, b, c) of E2^a E4^b E6^c with weight <= max_weight, lowest weight first."""
    out = []
    for w in range(0, max_weight + 1, 2):
        if exact_weight and w != max_weight:
            continue
        for c in range(w // 6 + 1):
            for b in range((w - 6 * c) // 4 + 1):
                rest = w - 6 * c - 4 * b
                if rest % 2:
                    continue
                a = rest // 2
                if e2_free and a:
                    continue
                out.append((a, b, c))
    return out


@dataclass
class QuasimodularFit:
    """A polynomial in E2, E4, E6 that reproduces a target series through ``residual_checked_to``."""

    max_weight: int
    terms: dict = field(default_factory=dict)
    residual_checked_to: int = 0

    def weight_of(self, mono) -> int:
        a, b, c = mono
        return 2 * a + 4 * b + 6 * c

    def reconstruct(self, trunc: int) -> QSeries:
        powers = _EisensteinPowers(trunc)
        out = QSeries.zero(QQ, trunc)
        for mono, coeff in self.terms.items():
            out = out + powers.monomial(*mono).scale(coeff)
        return out

    def has_e2(self) -> bool:
        return any(m[0] for m in self.terms)

    def is_integral_at(self, ell: int) -> bool:
        return all(Fraction(c).denominator % ell for c in self.terms.values())

    def weights(self) -> set[int]:
        return {self.weight_of(m) for m in self.terms}

    def describe(self) -> str:
        parts = []
        for (a, b, c), coeff in sorted(self.terms.items(), key=lambda kv: (self.weight_of(kv[0]), kv[0])):
            mono = "*".join(f"E{g}^{e}" if e > 1 else f"E{g}" for g, e in ((2, a), (4, b), (6, c)) if e) or "1"
            parts.append(f"({coeff})*{mono}")
        return " + ".join(parts) or "0"


def quasimodular_fit(target: QSeries, max_weight: int, check_to: int | None = None, *,
                     e2_free: bool = False, exact_weight: bool = False) -> QuasimodularFit:
    """Write ``target`` exactly as a QQ-combination of E2^a E4^b E6^c, 2a+4b+6c <= max_weight.

    The candidate is determined by the leading coefficients (as many as there
    are monomials, more only if those rows are dependent) and then checked
    through ``check_to`` (default: four times the number of monomials).
    Raises NotInClassError when no combination matches.
    """
    if max_weight % 2 or max_weight < 0:
        raise ValueError("max_weight must be a nonnegative even integer")
    if target.val < 0:
        raise ValueError("target must have no negative powers of q")
    monos = quasimodular_monomials(max_weight, e2_free, exact_weight)
    dim = len(monos)
    if check_to is None:
        check_to = 4 * dim
    if check_to > target.trunc:
        raise ValueError(f"target known through q^{target.trunc}, fit check needs q^{check_to}")
    tgt = target.change_ring(QQ) if target.ring != QQ else target
    powers = _EisensteinPowers(check_to)
    columns = [powers.monomial(*m) for m in monos]
    rows = [[col[n] for col in columns] for n in range(check_to + 1)]
    rhs = [tgt[n] for n in range(check_to + 1)]

    sol = None
    used = dim
    while sol is None:
        try:
            sol = linalg.solve(rows[:used], rhs[:used], QQ)
        except linalg.SingularSystemError:
            if used > check_to:
                raise NotInClassError("leading coefficients do not determine a unique fit") from None
            used += 1
        except linalg.InconsistentSystemError:
            raise NotInClassError("target is not a combination of the requested monomials") from None
    for n in range(check_to + 1):
        if sum(r * s for r, s in zip(rows[n], sol)) != rhs[n]:
            raise NotInClassError(f"fit fails at q^{n}")
    terms = {m: s for m, s in zip(monos, sol) if s}
    return QuasimodularFit(max_weight, terms, check_to)


# ---------------------------------------------------------------------------
# level 1 modular forms over an arbitrary ring


_E4E6_SHAPES = {0: (0, 0), 4: (1, 0), 6: (0, 1), 8: (2, 0), 10: (1, 1), 14: (2, 1)}


def modular_dimension(k: int) -> int:
    if k < 0 or k % 2:
        return 0
    if k % 12 == 2:
        return k // 12
    return k // 12 + 1


def modular_basis(k: int, trunc: int, ring: Ring = QQ) -> list[QSeries]:
    """Basis Delta^i E4^a E6^b of M_k(1); element i is q^i + O(q^(i+1))."""
    basis = []
    e4 = eisenstein_E(4, trunc).change_ring(ring)
    e6 = eisenstein_E(6, trunc).change_ring(ring)
    delta = discriminant(trunc, ring)
    for i in range(modular_dimension(k)):
        rest = k - 12 * i
        a, b = _E4E6_SHAPES[rest] if rest in _E4E6_SHAPES else _shape_for(rest)
        f = QSeries.constant(1, ring, trunc)
        for _ in range(a):
            f = f * e4
        for _ in range(b):
            f = f * e6
        for _ in range(i):
            f = f * delta
        basis.append(f.truncate(trunc))
    return basis


def _shape_for(w: int) -> tuple[int, int]:
    for b in range(w // 6 + 1):
        if (w - 6 * b) % 4 == 0:
            return (w - 6 * b) // 4, b
    raise ValueError(f"no E4^a E6^b of weight {w}")


def fit_modular_form(target: QSeries, k: int, check_to: int | None = None) -> list:
    """Coefficients of ``target`` in :func:`modular_basis` over the target's ring.

    Works over any ring because the basis is unitriangular.  Raises
    NotInClassError when the residual is nonzero through ``check_to``.
    """
    if target.val < 0:
        raise ValueError("target must have no negative powers of q")
    ring = target.ring
    top = target.trunc if check_to is None else check_to
    basis = modular_basis(k, top, ring)
    resid = target.truncate(top)
    coeffs = []
    for i, f in enumerate(basis):
        c = resid[i]
        coeffs.append(c)
        if not ring.is_zero(c):
            resid = resid - f.scale(c)
    bad = resid.valuation()
    if bad is not None:
        raise NotInClassError(f"not a weight {k} level 1 form: residual at q^{bad}")
    return coeffs
