"""Congruence verification, the ell-adic pipeline for rank moments, dissections and root-of-unity identities."""
from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from quasirank import forms, linalg, moments
from quasirank.qseries import PrecisionError, QSeries
from quasirank.rings import QQ, ZZ, Ring, Zmod, bernoulli, cyclo_ring, is_prime, legendre


# ---------------------------------------------------------------------------
# reports


@dataclass
class CongruenceReport:
    """Outcome of checking coefficient(A n + B) == 0 mod ``modulus`` for 0 <= n <= n_max."""

    statistic: str
    A: int
    B: int
    modulus: int
    n_max: int
    status: str = "verified-on-range"
    counterexample: tuple | None = None
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "verified-on-range"

    def to_json(self) -> str:
        d = asdict(self)
        if self.counterexample is not None:
            d["counterexample"] = [self.counterexample[0], str(self.counterexample[1])]
        return json.dumps(d, sort_keys=True, default=str)

    @classmethod
    def from_json(cls, line: str) -> CongruenceReport:
        d = json.loads(line)
        ce = d.get("counterexample")
        if ce is not None:
            d["counterexample"] = (ce[0], Fraction(ce[1]))
        return cls(**d)


@dataclass
class IdentityReport:
    """Outcome of an exact identity check."""

    name: str
    params: dict
    passed: bool
    checked_to: int
    counterexample: tuple | None = None
    notes: dict = field(default_factory=dict)

    def to_json(self) -> str:
        d = asdict(self)
        if self.counterexample is not None:
            d["counterexample"] = [str(x) for x in self.counterexample]
        return json.dumps(d, sort_keys=True, default=str)


def write_reports(reports, path: str) -> None:
    with open(path, "w") as fh:
        for r in reports:
            fh.write(r.to_json() + "\n")


# ---------------------------------------------------------------------------
# constants attached to a prime


@dataclass(frozen=True)
class EllData:
    ell: int
    beta: int
    r: int
    lam: int
    alpha: int  # residue mod ell^2

    @property
    def h1_weight(self) -> int:
        return (self.ell * (self.ell - 1) - self.r - 1) // 2

    @property
    def h2_weight(self) -> int:
        return (self.ell * (self.ell + 1) - self.r - 3) // 2

    @property
    def g2_weight_bound(self) -> int:
        return (self.ell * (self.ell + 3) - self.r - 1) // 2

    def g2k_weight_bound(self, k: int) -> int:
        return k * (self.ell + 1) - 1 + (self.ell - self.r) // 2


def ell_data(ell: int) -> EllData:
    if ell <= 3 or not is_prime(ell):
        raise ValueError("ell must be a prime > 3")
    beta = next(b for b in range(1, ell) if (24 * b) % ell == 1)
    r = (24 * beta - 1) // ell
    lam, rem = divmod(ell * ell + 24 * beta - 1, 24 * ell)
    if rem:
        raise ArithmeticError("lambda is not integral")
    alpha = Zmod(ell * ell).coerce(Fraction(ell) * bernoulli(ell - 1) / (ell - 1))
    return EllData(ell, beta, r, lam, alpha)


# ---------------------------------------------------------------------------
# generic congruence checks


def _coefficient_source(stat):
    if isinstance(stat, moments.MomentSeries):
        return stat.series.__getitem__, stat.series.trunc
    if isinstance(stat, QSeries):
        return stat.__getitem__, stat.trunc
    if isinstance(stat, dict):
        top = max(stat) if stat else -1
        return (lambda n: stat.get(n, 0)), top
    raise TypeError("statistic must be a MomentSeries, QSeries or {n: value} dict")


def _is_zero_mod(value, modulus: int) -> bool:
    v = Fraction(value)
    if v.denominator % modulus == 0:
        return False
    return (v.numerator * pow(v.denominator, -1, modulus)) % modulus == 0


def verify_congruence(stat, A: int, B: int, modulus: int, N: int, name: str = "") -> CongruenceReport:
    """Check that the coefficient of index A n + B vanishes mod ``modulus`` for 0 <= n <= N."""
    get, top = _coefficient_source(stat)
    if A * N + B > top:
        raise PrecisionError(f"need index {A * N + B}, statistic known through {top}")
    name = name or getattr(stat, "stat", "series")
    for n in range(N + 1):
        idx = A * n + B
        if idx < 0:
            continue
        v = get(idx)
        if not _is_zero_mod(v, modulus):
            return CongruenceReport(name, A, B, modulus, N, "counterexample", (n, Fraction(v)))
    return CongruenceReport(name, A, B, modulus, N)


def ramanujan_reports(n_arg_max: int = 2000) -> list[CongruenceReport]:
    P = forms.partition_series(n_arg_max)
    out = []
    for ell, B in ((5, 4), (7, 5), (11, 6)):
        out.append(verify_congruence(P, ell, B, ell, (n_arg_max - B) // ell, "p"))
    return out


EXPLICIT_ETA_CONGRUENCES = (
    # (2k, A, B, modulus, n_max)
    (2, 11 ** 3, 479, 11, 2),
    (4, 11, 0, 11, 80),
    (6, 49, 19, 7, 20),
    (8, 169, 162, 13, 5),
)


def explicit_eta_reports(table=EXPLICIT_ETA_CONGRUENCES) -> list[CongruenceReport]:
    out = []
    for k2, A, B, mod, N in table:
        s = moments.eta_moment_series(k2, A * N + B)
        out.append(verify_congruence(s, A, B, mod, N, f"eta_{k2}"))
    return out


def durfee_congruence_reports(n2: int = 30, n3: int = 25) -> list[CongruenceReport]:
    """Andrews' Durfee-symbol congruences on the enumerated range, plus both readings of the ambiguous line."""
    from quasirank.partitions import durfee_count

    d2 = {n: durfee_count(2, n, n2) for n in range(1, n2 + 1)}
    d3 = {n: durfee_count(3, n, n3) for n in range(1, n3 + 1)}
    out = []
    for stat, name, top, A, Bs, mods in ((d2, "D_2", n2, 5, (1, 4), (5,)),
                                        (d2, "D_2", n2, 7, (1, 5), (5, 7)),
                                        (d3, "D_3", n3, 7, (1, 5), (7,))):
        for B in Bs:
            for mod in mods:
                out.append(verify_congruence(stat, A, B, mod, (top - B) // A, name))
    return out


# ---------------------------------------------------------------------------
# Theorem 3 parts (1) and (2)


def progression_stream(series: QSeries, ell: int, modulus: int | None = None) -> QSeries:
    """n -> coefficient(ell n + beta_ell), reduced mod ``modulus`` (default ell)."""
    d = ell_data(ell)
    s = series.extract_progression(ell, d.beta)
    return s.reduce_mod(modulus or ell)


def _stream_over_eta(ell: int, order: int, n_max: int) -> QSeries:
    """(sum_n N_order(ell n + beta) q^n) / (q;q)^r_ell mod ell through q^n_max."""
    d = ell_data(ell)
    T = ell * n_max + d.beta
    R = moments.rank_moment_series(order, T)
    stream = progression_stream(R, ell).truncate(n_max)
    eta = forms.euler_product(n_max, ZZ) ** d.r
    return stream / eta.reduce_mod(ell)


def ell11_display_target(k: int, n_max: int) -> QSeries:
    """Right-hand side of the ell = 11 display in the n-index, mod 11."""
    R = Zmod(11)
    e = forms.euler_product(n_max, ZZ) ** 13
    one = QSeries.constant(1, QQ, n_max)
    E4, E6 = forms.eisenstein_E(4, n_max), forms.eisenstein_E(6, n_max)
    if k == 1:
        g = one.scale(3)
    elif k == 2:
        g = one.scale(7)
    elif k == 3:
        g = one.scale(4) + E4
    elif k == 4:
        g = one.scale(5) + E4.scale(6) + E6.scale(6)
    else:
        raise ValueError("the display covers k = 1..4")
    return (e.change_ring(R) * g.change_ring(R)).truncate(n_max)


def theorem3_part12(k: int, n_max: int, ell: int = 11) -> CongruenceReport:
    """N_2k(11 n + 6) stream against the ell = 11 display, for 0 <= n <= n_max."""
    if ell != 11:
        raise ValueError("the explicit display is for ell = 11")
    d = ell_data(ell)
    T = ell * n_max + d.beta
    stream = progression_stream(moments.rank_moment_series(2 * k, T), ell).truncate(n_max)
    target = ell11_display_target(k, n_max)
    name = f"N_{2 * k}(11n+6) vs display"
    for n in range(n_max + 1):
        if stream[n] != target[n]:
            return CongruenceReport(name, ell, d.beta, ell, n_max, "counterexample", (n, stream[n]),
                                    {"expected": target[n]})
    return CongruenceReport(name, ell, d.beta, ell, n_max)


def _mod_ell_span_rows(ell: int, max_weight: int, n_max: int, extra=()):
    """Rows (as coefficient lists mod ell) of E4^b E6^c, weight <= max_weight, plus ``extra`` series."""
    R = Zmod(ell)
    E4 = forms.eisenstein_E(4, n_max).change_ring(R)
    E6 = forms.eisenstein_E(6, n_max).change_ring(R)
    rows = []
    e4pow = [QSeries.constant(1, R, n_max)]
    while 4 * len(e4pow) <= max_weight:
        e4pow.append(e4pow[-1] * E4)
    e6 = QSeries.constant(1, R, n_max)
    c = 0
    while 6 * c <= max_weight:
        for b in range(len(e4pow)):
            if 4 * b + 6 * c <= max_weight:
                rows.append(list((e4pow[b] * e6).coeffs[: n_max + 1]))
        e6 = e6 * E6
        c += 1
    for x in extra:
        rows.append([x[n] for n in range(n_max + 1)])
    return rows


def _rank_mod(rows, ell: int) -> int:
    rows = [list(r) for r in rows]
    return len(linalg.row_reduce(_transpose(rows), Zmod(ell), len(rows)))


def _transpose(rows):
    return [list(col) for col in zip(*rows)] if rows else []


def in_mod_ell_span(target: QSeries, ell: int, max_weight: int, n_max: int, extra=()) -> bool:
    """Is ``target`` (mod ell, through q^n_max) a combination of level 1 forms of weight <= max_weight and ``extra``?"""
    base = _mod_ell_span_rows(ell, max_weight, n_max, extra)
    with_target = base + [[target[n] for n in range(n_max + 1)]]
    return _rank_mod(base, ell) == _rank_mod(with_target, ell)


def theorem3_part1_witness(ell: int, n_max: int) -> IdentityReport:
    """N_2 stream / eta^r is a mod-ell combination of level 1 forms of weight <= (ell(ell+3)-r-1)/2."""
    d = ell_data(ell)
    g = _stream_over_eta(ell, 2, n_max)
    ok = in_mod_ell_span(g, ell, d.g2_weight_bound, n_max)
    const = all(g[n] == 0 for n in range(1, n_max + 1))
    return IdentityReport("theorem3_part1", {"ell": ell}, ok, n_max,
                          notes={"weight_bound": d.g2_weight_bound, "constant_quotient": const,
                                 "leading": g[0]})


def solve_ck(ell: int, k: int, n_max: int) -> IdentityReport:
    """Residues c with N_2k stream - c N_2 stream == eta^r G mod ell, G in the mod-ell span up to the weight bound.

    When the N_2 stream over eta^r is itself in that span every residue is
    feasible and c_k is not determined by the congruence alone.
    """
    d = ell_data(ell)
    g2 = _stream_over_eta(ell, 2, n_max)
    g2k = _stream_over_eta(ell, 2 * k, n_max)
    bound = d.g2k_weight_bound(k)
    feasible = [c for c in range(ell) if in_mod_ell_span(g2k - g2.scale(c), ell, bound, n_max)]
    identifiable = len(feasible) == 1
    return IdentityReport("theorem3_ck", {"ell": ell, "k": k}, bool(feasible), n_max,
                          notes={"feasible_c": feasible, "identifiable": identifiable, "weight_bound": bound,
                                 "n2_stream_in_span": in_mod_ell_span(g2, ell, bound, n_max)})


# ---------------------------------------------------------------------------
# Theorem 3 part (3)


@dataclass
class Part3Data:
    ell: int
    H1: QSeries
    H2: QSeries
    h1_coeffs: list
    h2_coeffs: list
    difference_over_ell: QSeries


def tilde_E(ell: int, n_max: int, ring: Ring) -> QSeries:
    """ell B_{ell-1} / (2(ell-1)) - ell Phi_{ell-2}."""
    const = Fraction(ell) * bernoulli(ell - 1) / (2 * (ell - 1))
    return QSeries.constant(ring.coerce(const), ring, n_max) - forms.eisenstein_phi(ell - 2, n_max, ring).scale(ell)


def theorem3_part3(ell: int, n_max: int = 8) -> IdentityReport:
    """H_1 == H_2 mod ell through q^(ell n_max), both level 1 forms of the stated weights, and the eta-quotient step."""
    d = ell_data(ell)
    m2 = ell * ell
    R = Zmod(m2)
    top = ell * n_max  # H-index range; 24-scaled index 24 ell n_max
    need = ell * (top + d.lam)
    D = forms.discriminant(need, R)
    dpow = forms.eta_power(ell * ell - 1, 1, need, R)  # Delta^((ell^2-1)/24)
    f = forms.t_operator(dpow.scale(d.alpha), ell, (ell * ell - 1) // 2)
    low = [f[n] for n in range(0, d.lam)]
    dl = forms.discriminant(top + d.lam, R) ** d.lam
    H1 = (f.truncate(top + d.lam) / dl).truncate(top)
    G = forms.u_operator(dpow * tilde_E(ell, need, R).scale(2), ell)
    H2 = (G.truncate(top + d.lam) / dl).truncate(top)
    notes: dict = {"weights": (d.h1_weight, d.h2_weight), "f_low_coefficients_zero": all(c == 0 for c in low)}

    diff = H1 - H2
    cong = all(c % ell == 0 for c in diff.coeffs)
    notes["H1_equiv_H2_mod_ell"] = cong
    first_bad = next((n for n, c in diff.items() if c % ell), None)

    fits = {}
    for name, H, w in (("H1", H1, d.h1_weight), ("H2", H2, d.h2_weight)):
        try:
            coeffs = forms.fit_modular_form(H, w)
            fits[name] = [int(c) for c in coeffs]
        except forms.NotInClassError as exc:
            fits[name] = None
            notes[f"{name}_fit_error"] = str(exc)
    notes["fits"] = fits

    eta_ok, eta_bad = eta_quotient_check(ell, 24 * top)
    notes["eta_quotient_mod_ell2"] = eta_ok
    quotient = QSeries(Zmod(ell), 0, [(c // ell) % ell for c in diff.coeffs], top) if cong else None
    passed = cong and all(v is not None for v in fits.values()) and eta_ok and notes["f_low_coefficients_zero"]
    ce = None
    if not passed:
        ce = ("H1-H2", first_bad) if not cong else ("eta", eta_bad) if not eta_ok else ("fit", None)
    rep = IdentityReport("theorem3_part3", {"ell": ell, "n_max": n_max}, passed, top, ce, notes)
    rep.notes["difference_over_ell_head"] = list(quotient.coeffs[:12]) if quotient is not None else None
    return rep


def theorem3_part3_data(ell: int, n_max: int = 8) -> Part3Data:
    """The series behind :func:`theorem3_part3`, for inspection."""
    d = ell_data(ell)
    R = Zmod(ell * ell)
    top = ell * n_max
    need = ell * (top + d.lam)
    dpow = forms.eta_power(ell * ell - 1, 1, need, R)
    f = forms.t_operator(dpow.scale(d.alpha), ell, (ell * ell - 1) // 2)
    dl = forms.discriminant(top + d.lam, R) ** d.lam
    H1 = (f.truncate(top + d.lam) / dl).truncate(top)
    G = forms.u_operator(dpow * tilde_E(ell, need, R).scale(2), ell)
    H2 = (G.truncate(top + d.lam) / dl).truncate(top)
    diff = H1 - H2
    quotient = QSeries(Zmod(ell), 0, [(c // ell) % ell for c in diff.coeffs], top)
    return Part3Data(ell, H1, H2, forms.fit_modular_form(H1, d.h1_weight), forms.fit_modular_form(H2, d.h2_weight),
                     quotient)


def eta_quotient_check(ell: int, n_max: int) -> tuple[bool, int | None]:
    """P == (q;q)^(ell^2-1) / (q^ell;q^ell)^ell mod ell^2 through q^n_max (the z-index of 1/eta(24z))."""
    R = Zmod(ell * ell)
    P = forms.partition_series(n_max, R)
    num = forms.euler_product(n_max, ZZ) ** (ell * ell - 1)
    den = (forms.euler_product(n_max // ell, ZZ) ** ell).rescale(ell).truncate(n_max)
    rhs = num.reduce_mod(ell * ell) / den.reduce_mod(ell * ell)
    bad = P.first_difference(rhs, n_max)
    return bad is None, bad


# ---------------------------------------------------------------------------
# dissections and root-of-unity identities


def dissection_check(k: int, t: int, N: int) -> IdentityReport:
    """NF_k(r, t; n) from the roots-of-unity filter against enumeration, all r, 1 <= n <= N."""
    from quasirank.partitions import full_rank_residue_table

    ring = cyclo_ring(t)
    vals = [moments.full_rank_gf_at_root(k, t, j, N) for j in range(t)]
    table = full_rank_residue_table(k, t, N)
    inv_t = Fraction(1, t)
    for n in range(1, N + 1):
        for r in range(t):
            acc = ring.zero
            for j in range(t):
                acc = acc + vals[j][n] * ring.root_power(-r * j)
            acc = acc * inv_t
            if not acc.is_rational():
                return IdentityReport("dissection", {"k": k, "t": t}, False, N, (n, r, acc), {"reason": "irrational"})
            got = acc.coeffs[0]
            if got != table[n][r]:
                return IdentityReport("dissection", {"k": k, "t": t}, False, N, (n, r, got),
                                      {"expected": table[n][r]})
        if sum(table[n]) != vals[0][n].coeffs[0]:
            return IdentityReport("dissection", {"k": k, "t": t}, False, N, (n, "total"), {})
    return IdentityReport("dissection", {"k": k, "t": t}, True, N)


def root_identity_hypotheses(t: int, r: int, s: int, d: int) -> bool:
    """Hypothesis list for the identity with parameters (t, r, s, d)."""
    if legendre(1 - 24 * d, t) != 1:
        return False
    for u in range(d):
        for x in (r, s):
            if (2 * x - 3 * (1 - d + 2 * u)) % (2 * t) == 0:
                return False
            if any((x - y) % t == 0 for y in (2 + 3 * u, 1 + 3 * u, 2 - 3 * d + 3 * u, 1 - 3 * d + 3 * u)):
                return False
    return True


def root_identity_value(t: int, r: int, s: int, d: int, form: int = 3):
    """Exact value of the finite sum in Z[zeta_2t]; ``form`` 2 keeps the quotient (1 - x^d)/(1 - x)."""
    ring = cyclo_ring(2 * t)
    Z = ring.root_power

    def zt(e):
        return Z(2 * e)

    total = ring.zero
    for j in range(1, t):
        lead = (zt(-r * j) - zt(-s * j)) * Z(3 * j * (1 - d))
        if form == 3:
            geo = ring.zero
            for u in range(d):
                geo = geo + zt(3 * j * u)
            tail = ring.one - Z(j * (3 * d + 1)) - Z(j * (1 - 3 * d)) - Z(j * (3 * d - 1)) - Z(-j * (3 * d + 1))
        elif form == 2:
            geo = (ring.one - zt(3 * d * j)) / (ring.one - zt(3 * j))
            tail = ring.one - (Z(j) + Z(-j)) * (Z(3 * d * j) + Z(-3 * d * j))
        else:
            raise ValueError("form must be 2 or 3")
        total = total + lead * geo * tail
    return total


@dataclass
class RootIdentityResult:
    t: int
    r: int
    s: int
    d: int
    hypotheses: bool
    zero: bool
    forms_agree: bool

    def row(self) -> str:
        return f"{self.t},{self.r},{self.s},{self.d},{int(self.hypotheses)},{int(self.zero)}"


def root_identity_check(t: int, r: int, s: int, d: int) -> RootIdentityResult:
    if t < 5 or not is_prime(t):
        raise ValueError("t must be a prime >= 5")
    v3 = root_identity_value(t, r, s, d, 3)
    v2 = root_identity_value(t, r, s, d, 2)
    return RootIdentityResult(t, r, s, d, root_identity_hypotheses(t, r, s, d), v3.is_zero(), v2 == v3)


def root_identity_table(t: int) -> list[RootIdentityResult]:
    return [root_identity_check(t, r, s, d) for d in range(t) for r in range(t) for s in range(t)]


# ---------------------------------------------------------------------------
# scanning


def worker_count() -> int:
    env = os.environ.get("QUASIRANK_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"QUASIRANK_THREADS must be an integer, got {env!r}") from None
    return min(8, os.cpu_count() or 1)


def scan_congruences(stat, ell: int, j: int, A_candidates, N: int | None = None,
                     name: str = "") -> list[CongruenceReport]:
    """Progressions (A, B), 0 <= B < A, with coefficient(A n + B) == 0 mod ell^j on the available range.

    Heuristic: a pass means the congruence held at every tested point and
    nothing more.  Each progression needs at least ``N + 1`` points (default:
    as many as the truncation allows, at least 2).
    """
    get, top = _coefficient_source(stat)
    modulus = ell ** j
    jobs = []
    for A in sorted(set(A_candidates)):
        for B in range(A):
            n_top = (top - B) // A
            if N is not None:
                if n_top < N:
                    raise PrecisionError(f"A={A}, B={B}: need index {A * N + B}, have {top}")
                n_top = N
            if n_top < 1:
                continue
            jobs.append((A, B, n_top))

    def run(job):
        A, B, n_top = job
        return verify_congruence(stat, A, B, modulus, n_top, name or getattr(stat, "stat", "series"))

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        results = list(pool.map(run, jobs))
    return sorted((r for r in results if r.passed), key=lambda r: (r.A, r.B))


def default_candidates(ell: int, ts=(1,)) -> list[int]:
    return sorted({ell ** e * t * t for e in (1, 2, 3) for t in ts})
