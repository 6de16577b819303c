from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from quasirank import forms
from quasirank.qseries import QSeries
from quasirank.rings import QQ, ZZ, Zmod


def brute_sigma(j, n):
    return sum(d ** j for d in range(1, n + 1) if n % d == 0)


def test_partition_numbers_known_values():
    p = forms.partition_numbers(200)
    assert p[:11] == (1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42)
    assert p[100] == 190569292
    assert p[200] == 3972999029388


def test_euler_product_is_pentagonal():
    e = forms.euler_product(100)
    pent = {}
    for k in range(-10, 11):
        pent[k * (3 * k - 1) // 2] = (-1) ** k
    assert all(e[n] == pent.get(n, 0) for n in range(101))


def test_pochhammer_matches_euler():
    assert forms.pochhammer(1, None, 40) == forms.euler_product(40)
    finite = forms.pochhammer(1, 3, 20)  # (1-q)(1-q^2)(1-q^3)
    assert [finite[n] for n in range(7)] == [1, -1, -1, 0, 1, 1, -1]


@pytest.mark.parametrize("r", [1, 5, 13, 24, 120])
def test_eta_power_against_repeated_products(r):
    want = forms.euler_product(60)
    base = want
    for _ in range(r - 1):
        want = want * base
    got = forms._euler_power(r, 60)
    assert all(got[n] == want[n] for n in range(61))


def test_discriminant_tau_values_and_hecke():
    D = forms.discriminant(200)
    assert [D[n] for n in range(1, 8)] == [1, -24, 252, -1472, 4830, -6048, -16744]
    for ell in (2, 3, 5, 7):
        TD = forms.t_operator(D, ell, 12)
        assert TD == D.truncate(TD.trunc).scale(D[ell])


def test_fractional_eta_power_rejected():
    with pytest.raises(ValueError):
        forms.eta_power(1, 1, 10)


@pytest.mark.parametrize("j", [1, 3, 5, 9])
def test_phi_is_divisor_sum(j):
    phi = forms.eisenstein_phi(j, 30)
    assert phi[0] == 0 and all(phi[n] == brute_sigma(j, n) for n in range(1, 31))


def test_eisenstein_normalization():
    assert forms.eisenstein_E(2, 5)[1] == -24
    assert forms.eisenstein_E(4, 5)[1] == 240
    assert forms.eisenstein_E(6, 5)[1] == -504
    E4, E6 = forms.eisenstein_E(4, 40), forms.eisenstein_E(6, 40)
    # E4^3 - E6^2 = 1728 Delta
    assert E4 * E4 * E4 - E6 * E6 == forms.discriminant(40, QQ).scale(1728)


def test_ramanujan_e2_identity():
    E2, E4 = forms.eisenstein_E(2, 80), forms.eisenstein_E(4, 80)
    assert E2.delta().scale(12) == E2 * E2 - E4


@pytest.mark.parametrize("name,k", [("E4", 4), ("E6", 6), ("Delta", 12)])
def test_serre_derivative_is_modular(name, k):
    T = 60
    F = {"E4": forms.eisenstein_E(4, T), "E6": forms.eisenstein_E(6, T), "Delta": forms.discriminant(T, QQ)}[name]
    target = F.delta().scale(12) - forms.eisenstein_E(2, T) * F.scale(k)
    fit = forms.quasimodular_fit(target, k + 2, check_to=T)
    assert not fit.has_e2()
    assert fit.weights() <= {k + 2}  # empty for Delta: no weight 14 cusp forms
    assert fit.reconstruct(T) == target


def test_quasimodular_fit_rejects_nonmembers():
    with pytest.raises(forms.NotInClassError):
        forms.quasimodular_fit(forms.partition_series(60, QQ), 6)
    with pytest.raises(ValueError):
        forms.quasimodular_fit(forms.eisenstein_E(4, 10), 8)  # check range exceeds truncation


@given(st.integers(0, 40).filter(lambda k: k % 2 == 0 and k != 2))
def test_modular_basis_dimension(k):
    basis = forms.modular_basis(k, 30)
    assert len(basis) == forms.modular_dimension(k)
    for i, f in enumerate(basis):
        assert f.valuation() == i and f[i] == 1


def test_fit_modular_form_over_residues():
    R = Zmod(121)
    E4 = forms.eisenstein_E(4, 40).change_ring(R)
    D = forms.discriminant(40, R)
    target = E4 * E4 * E4.scale(3) + D.scale(7)
    coeffs = forms.fit_modular_form(target, 12)
    assert forms.fit_modular_form(target, 12) == coeffs
    rebuilt = QSeries.zero(R, 40)
    for c, f in zip(coeffs, forms.modular_basis(12, 40, R)):
        rebuilt = rebuilt + f.scale(c)
    assert rebuilt == target
    with pytest.raises(forms.NotInClassError):
        forms.fit_modular_form(forms.partition_series(40, R), 12)


def test_t_operator_vs_u_operator_mod_square():
    # the ell^(k-1) term vanishes modulo ell^2 for large weight
    R = Zmod(25)
    D = forms.discriminant(100, R)
    assert forms.t_operator(D, 5, 12) == forms.u_operator(D, 5)


def test_product_coefficient():
    P, e = forms.partition_series(20), forms.euler_product(20)
    assert forms.product_coefficient(P, e, 0) == 1
    assert all(forms.product_coefficient(P, e, n) == 0 for n in range(1, 21))
    assert forms.divisor_sigma(3, 6) == 1 + 8 + 27 + 216
    assert Fraction(forms.eisenstein_E(4, 3)[2]) == 240 * 9
