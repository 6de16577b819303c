from __future__ import annotations

from fractions import Fraction

import pytest

from quasirank import forms, moments as me
from quasirank import partitions as pl
from quasirank.qseries import QSeries
from quasirank.rings import QQ, cyclo_ring

T = 30


def test_hypergeometric_equals_lambert():
    assert me.rank_gf_hyper(T).agrees_with(me.rank_gf_lambert(T))


def test_bivariate_rows_match_enumeration_and_support():
    R, C = me.rank_gf_lambert(T), me.crank_gf(T)
    for n in range(1, T + 1):
        assert R.row(n) == pl.rank_row(n)
        assert {m: c for m, c in C.row(n).items() if c} == {m: c for m, c in pl.crank_row(n).items() if c}
        assert all(abs(m) < n for m in R.row(n))
        assert all(abs(m) <= n for m in C.row(n))


def test_pde_residual_vanishes():
    assert me.pde_residual(T).is_zero()


@pytest.mark.parametrize("a", [2, 4, 6, 8])
def test_rankcrank_identity(a):
    assert me.rankcrank_residual(a, 25).is_zero()


def test_degenerate_order_two_case():
    # the a = 2 case reads 0 = 0: Y_2 vanishes identically
    assert me.y_series(1, 25).series.is_zero()


def test_order_four_display():
    assert me.display_r4_residual(25).is_zero()


@pytest.mark.parametrize("a", [2, 4, 6, 8])
def test_crank_recurrence_matches_delta_w(a):
    assert me.crank_moment_series(a, 25, "delta_w") == me.crank_moment_series(a, 25, "recurrence")


@pytest.mark.parametrize("k", [2, 3, 4])
def test_solver_matches_lambert_path(k):
    assert me.solve_R2k(k, 20).series == me.rank_moment_series(2 * k, 20)


@pytest.mark.parametrize("kind,order", [("R", 2), ("R", 4), ("C", 2), ("C", 6), ("Rk", 1), ("Rk", 3)])
def test_moment_series_checked_mode(kind, order):
    me.moment_series(kind, order, 20, checked=True)


def test_checked_mode_detects_corruption():
    ms = me.moment_series("R", 2, 10)
    bad = me.MomentSeries(ms.stat, ms.series + QSeries.monomial(5, 1, ms.series.ring, 10), ms.params)
    with pytest.raises(AssertionError):
        me.check_against_oracle(bad, 10)


def test_pk_routes_and_congruences():
    for k in range(1, 11):
        assert me.pk_poly(k, "recurrence") == me.pk_poly(k, "explicit") == me.pk_poly(k, "rrec")
        assert me.vk_identity_holds(k)
    assert me.pk_poly(3).coeffs == (1, -24, 108)
    assert me.pk_poly(3).reduce_mod(5) == (1, 1, 3)
    for ell in (5, 7, 11, 13):
        assert me.pcong_check(ell)
        assert me.pk_poly((ell + 1) // 2).degree == (ell - 1) // 2


def test_apply_delta_poly():
    x = forms.partition_series(10)
    p = 1 - 12 * me.IntPolynomial.x()
    assert me.apply_delta_poly(p, x) == x - x.delta().scale(12)


def test_moment_series_save_load(tmp_path):
    ms = me.moment_series("C", 4, 12)
    path = tmp_path / "c4.txt"
    ms.save(str(path))
    back = me.MomentSeries.load(str(path))
    assert back.series == ms.series and back.stat == ms.stat and back.params == ms.params
    assert '"trunc": 12' in (tmp_path / "c4.txt.json").read_text()


# ---------------------------------------------------------------------------
# marked Durfee generating functions at points


def oracle_at(k, pts, n, ring):
    return QSeries(ring, 0, pl.durfee_multivariate(k, pts, n, ring), n)


def test_small_k_formula_at_fifth_roots():
    R = cyclo_ring(5)
    pts = [R.root_power(1), R.root_power(2)]
    assert me.durfee_gf_eval(pts, 12) == oracle_at(2, pts, 12, R)


def test_small_k_three_points():
    R = cyclo_ring(7)
    pts = [R.root_power(1), R.root_power(2), R.root_power(3)]
    assert me.durfee_gf_eval(pts, 10) == oracle_at(3, pts, 10, R)


def test_full_rank_specialization():
    R = cyclo_ring(7)
    w = R.gen
    got = me.durfee_gf_eval([w, w * w], 12)
    table = pl.full_rank_table(2, 12)
    for n in range(1, 13):
        assert got[n] == sum((R.root_power(m) * c for m, c in table[n].items()), R.zero)


def test_single_point_is_rank_function():
    R = cyclo_ring(5)
    x = R.gen
    assert me.durfee_gf_eval([x], 10) == me.rank_gf_lambert(10).weighted(lambda m: x ** m, R)


def test_degenerate_points_rejected():
    R = cyclo_ring(5)
    with pytest.raises(me.DegeneratePointsError):
        me.durfee_gf_eval([R.gen, R.gen], 5)
    with pytest.raises(me.DegeneratePointsError):
        me.durfee_gf_eval([R.gen, R.root_power(4)], 5)
    with pytest.raises(me.DegeneratePointsError):
        me.durfee_gf_deriv(R.coerce(-1), 5)


@pytest.mark.parametrize("t", [3, 5])
def test_equal_arguments_derivative(t):
    R = cyclo_ring(t)
    x = R.gen
    got = me.durfee_gf_deriv(x, 12)
    assert got == oracle_at(2, [x, x], 12, R)
    assert got[1] == 0


def test_rootunity_sign_convention():
    general = me.rootunity_eval(2, 5, 1, 10)
    literal = me.rootunity_eval(2, 5, 1, 10, literal=True)
    assert general == oracle_at(2, [cyclo_ring(5).root_power(1), cyclo_ring(5).root_power(2)], 10, cyclo_ring(5))
    assert literal == -general
    assert me.rootunity_eval(3, 7, 1, 8, literal=True) == me.rootunity_eval(3, 7, 1, 8)


# ---------------------------------------------------------------------------
# twisted series


def naive_twisted_r2(a, c, n_top):
    """Term-by-term expansion of the defining bilateral sums."""
    R = cyclo_ring(2 * c)
    z = R.root_power(2 * a)
    zi = R.inv(z)
    s1 = [R.zero] * (n_top + 1)
    s2 = [R.zero] * (n_top + 1)
    for n in range(-n_top - 2, n_top + 3):
        sign = -1 if n % 2 == 0 else 1  # (-1)^(n+1)
        for e0, acc, power in ((n * (3 * n + 1) // 2, s1, 1), (3 * n * (n + 1) // 2, s2, 2)):
            if n == 0:
                if 0 <= e0 <= n_top:
                    acc[e0] = acc[e0] + R.inv((R.one - z) ** power) * sign
                continue
            for j in range(0, 3 * n_top + 3):
                if n > 0:
                    e, coef = e0 + n * j, z ** j * (j + 1 if power == 2 else 1)
                else:
                    # 1/(1 - z q^-m) = -z^-1 q^m / (1 - z^-1 q^m)
                    m = -n
                    if power == 1:
                        e, coef = e0 + m * (j + 1), -(zi ** (j + 1))
                    else:
                        e, coef = e0 + m * (j + 2), zi ** (j + 2) * (j + 1)
                if e > n_top:
                    break
                if e >= 0:
                    acc[e] = acc[e] + coef * sign
    P = forms.partition_series(n_top).change_ring(R)
    A, B = QSeries(R, 0, s1, n_top), QSeries(R, 0, s2, n_top)
    return (A * P).scale(R.root_power(a) * Fraction(1, 2)) + (B * P).scale(R.root_power(3 * a))


@pytest.mark.parametrize("a,c", [(1, 2), (1, 3), (2, 3), (1, 5), (2, 5), (5, 12)])
def test_twisted_r2_against_naive_expansion(a, c):
    assert me.twisted_r2(a, c, 12) == naive_twisted_r2(a, c, 12)


def test_twisted_r2_at_one_half_vanishes():
    # at zeta = -1 the two sums cancel: the series is identically zero
    assert me.twisted_r2(1, 2, 15).is_zero()


@pytest.mark.parametrize("a,c", [(1, 2), (1, 3), (2, 5), (1, 6)])
def test_rank_derivative_formula(a, c):
    direct = me.rank_derivative_at(a, c, 12)
    assert me.rank_derivative_from_sums(a, c, 12) == direct
    if c > 2:
        assert me.rank_derivative_from_sums(a, c, 12, paper_factor=True) != direct


def test_twisted_eisenstein():
    g = me.twisted_eisenstein(1, 1, 2, 20)
    assert g[2] == 2
    for j in (1, 2, 3):
        assert me.twisted_eisenstein(j, 1, 5, 20) == me.twisted_eisenstein_double_sum(j, 1, 5, 20)
    assert me.twisted_eisenstein(2, 1, 5, 15) == -me.twisted_eisenstein(2, 4, 5, 15)
    assert me.twisted_eisenstein(2, 1, 1, 10).is_zero()


@pytest.mark.parametrize("kind,j,a,c", [("R", 0, 1, 2), ("R", 2, 1, 3), ("C", 0, 1, 3), ("C", 2, 2, 5),
                                        ("R", 1, 1, 2)])
def test_twisted_moment_series_vs_enumeration(kind, j, a, c):
    s = me.twisted_moment_series(kind, j, a, c, 15).series
    for n in range(1, 16):
        assert s[n] == pl.twisted_moments(j, a, c, n, kind=kind)


def test_twisted_anchor_values():
    assert me.twisted_moment_series("R", 0, 1, 2, 4).series[4] == -3
    R = cyclo_ring(3)
    assert me.twisted_moment_series("C", 0, 1, 3, 2).series[1] == R.gen + R.root_power(-1) - 1
    assert me.twisted_moment_series("R", 1, 1, 2, 10).series.is_zero()


def test_t2_index_and_scale():
    assert me.s_index(1, 5) == 1
    assert me.s_index(1, 12) == 0
    assert me.s_index(11, 12) == 3
    for a, c in ((1, 2), (1, 6), (5, 6)):
        with pytest.raises(ValueError):
            me.s_index(a, c)
    t = me.t2_series(1, 5, 3)
    assert t.params["exponent_scale"] == 120 and t.series.ring == QQ
    assert t.series.val == 12  # q^(1/10)
    assert me.t2_series(11, 12, 2).series.val < 0


def test_quasimodular_witnesses():
    for k in range(1, 5):
        assert me.quasimodular_witness("C", k).is_integral_at(11)
    for k in (2, 3, 4):
        assert me.quasimodular_witness("R", k).is_integral_at(11)
    fit = me.quasimodular_witness("C", 1)
    assert fit.terms == {(0, 0, 0): Fraction(1, 12), (1, 0, 0): Fraction(-1, 12)}
