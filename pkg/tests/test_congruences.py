from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import pytest

from quasirank import congruences as cg
from quasirank import forms, moments
from quasirank.qseries import PrecisionError
from quasirank.rings import QQ

DATA = Path(__file__).parent / "data"


@pytest.mark.parametrize("ell,beta,r,lam", [(5, 4, 19, 1), (7, 5, 17, 1), (11, 6, 13, 1), (13, 6, 11, 1)])
def test_ell_data(ell, beta, r, lam):
    d = cg.ell_data(ell)
    assert (d.beta, d.r, d.lam) == (beta, r, lam)
    assert (24 * d.beta) % ell == 1 and 24 * d.beta - 1 == ell * d.r


def test_ell_data_constants_for_eleven():
    d = cg.ell_data(11)
    assert d.alpha == 111
    assert (d.h1_weight, d.h2_weight, d.g2_weight_bound) == (48, 58, 70)
    with pytest.raises(ValueError):
        cg.ell_data(3)


def test_verify_congruence_reports_counterexample():
    p = forms.partition_series(50)
    good = cg.verify_congruence(p, 5, 4, 5, 9, "p")
    assert good.passed
    bad = cg.verify_congruence(p, 5, 3, 5, 9, "p")
    assert not bad.passed and bad.counterexample == (0, Fraction(3))
    with pytest.raises(PrecisionError):
        cg.verify_congruence(p, 5, 4, 5, 10)


def test_report_json_round_trip():
    rep = cg.verify_congruence(forms.partition_series(30), 7, 1, 7, 3, "p")
    back = cg.CongruenceReport.from_json(rep.to_json())
    assert back == rep


def test_golden_congruence_reports():
    lines = (DATA / "congruences.jsonl").read_text().splitlines()
    golden = [cg.CongruenceReport.from_json(x) for x in lines]
    now = cg.ramanujan_reports(2000) + cg.explicit_eta_reports() + cg.durfee_congruence_reports()
    assert now == golden


def test_ambiguous_durfee_line_holds_mod_seven_not_five():
    reps = {(r.statistic, r.A, r.B, r.modulus): r.passed for r in cg.durfee_congruence_reports()}
    assert reps[("D_2", 7, 1, 7)] and reps[("D_2", 7, 5, 7)]
    assert not reps[("D_2", 7, 1, 5)] and not reps[("D_2", 7, 5, 5)]


def test_theorem3_display_and_anchor():
    for k in (1, 2, 3, 4):
        assert cg.theorem3_part12(k, 8).passed
    assert moments.rank_moment_series(2, 6)[6] == 80


@pytest.mark.parametrize("ell", [5, 7, 11, 13])
def test_theorem3_part1(ell):
    rep = cg.theorem3_part1_witness(ell, 30)
    assert rep.passed and rep.notes["constant_quotient"]


def test_theorem3_part1_rational_fit_is_constant():
    g = cg._stream_over_eta(11, 2, 48)
    lifted = g.change_ring(QQ)
    fit = forms.quasimodular_fit(lifted, 12, e2_free=True)
    assert fit.terms == {(0, 0, 0): 3}


def test_ck_not_identifiable_at_eleven():
    rep = cg.solve_ck(11, 2, 30)
    assert rep.notes["feasible_c"] == list(range(11))


@pytest.mark.parametrize("ell", [5, 11])
def test_theorem3_part3(ell):
    rep = cg.theorem3_part3(ell)
    assert rep.passed, rep.notes
    golden = json.loads((DATA / "theorem3_part3.json").read_text())[str(ell)]
    assert rep.notes["fits"] == {"H1": golden["H1"], "H2": golden["H2"]}


def test_tilde_e_is_scaled_eisenstein():
    R = QQ
    e = cg.tilde_E(11, 20, R)
    E10 = forms.eisenstein_E(10, 20)
    assert e == E10.scale(e[0])


def test_eta_quotient_step_fails_mod_higher_power():
    ok, _ = cg.eta_quotient_check(5, 200)
    assert ok
    from quasirank.rings import Zmod

    P = forms.partition_series(60, Zmod(125))
    num = forms.euler_product(60) ** 24
    den = (forms.euler_product(12) ** 5).rescale(5).truncate(60)
    assert P.first_difference(num.reduce_mod(125) / den.reduce_mod(125)) is not None


@pytest.mark.parametrize("k,t", [(2, 5), (2, 7), (3, 7)])
def test_dissection(k, t):
    assert cg.dissection_check(k, t, 10).passed


def test_root_identity_forms_agree_and_trivial_cases():
    for r in range(5):
        assert cg.root_identity_check(5, r, r, 2).zero
    assert all(cg.root_identity_check(5, r, s, 0).zero for r in range(5) for s in range(5))
    with pytest.raises(ValueError):
        cg.root_identity_check(4, 0, 1, 1)


def test_root_identity_golden_t7():
    rows = (DATA / "root_identity_t7.csv").read_text().splitlines()[1:]
    assert [r.row() for r in cg.root_identity_table(7)] == rows
    assert all(r.forms_agree for r in cg.root_identity_table(7))


def test_scan_finds_known_progressions():
    eta4 = moments.eta_moment_series(4, 300)
    found = {(r.A, r.B) for r in cg.scan_congruences(eta4, 11, 1, [11])}
    assert (11, 0) in found
    p = forms.partition_series(400)
    assert {(r.A, r.B) for r in cg.scan_congruences(p, 5, 1, [5])} == {(5, 4)}
    assert cg.scan_congruences(p, 13, 1, [13]) == []


def test_scan_is_deterministic_across_worker_counts(monkeypatch):
    s = moments.eta_moment_series(2, 400)
    monkeypatch.setenv("QUASIRANK_THREADS", "1")
    one = [r.to_json() for r in cg.scan_congruences(s, 11, 1, [11, 121])]
    monkeypatch.setenv("QUASIRANK_THREADS", "4")
    four = [r.to_json() for r in cg.scan_congruences(s, 11, 1, [11, 121])]
    assert one == four
    monkeypatch.setenv("QUASIRANK_THREADS", "many")
    with pytest.raises(ValueError):
        cg.worker_count()


def test_scan_precondition():
    with pytest.raises(PrecisionError):
        cg.scan_congruences(forms.partition_series(20), 5, 1, [5], N=10)


def test_fermat_reduction_of_moments():
    # rank moments of order ell + 1 and 2 agree mod ell (m^(ell+1) == m^2)
    for ell in (5, 7, 11):
        a = moments.rank_moment_series(ell + 1, 40).reduce_mod(ell)
        b = moments.rank_moment_series(2, 40).reduce_mod(ell)
        assert a == b
