from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from quasirank import forms
from quasirank.qseries import PrecisionError, QSeries, WQSeries
from quasirank.rings import QQ, ZZ, RingMismatchError, Zmod, cyclo_ring

RINGS = [ZZ, QQ, Zmod(11), Zmod(10 ** 9 + 7), cyclo_ring(5)]


def series(ring, min_val=0):
    def build(args):
        val, coeffs = args
        return QSeries(ring, val, coeffs, val + len(coeffs) - 1)

    if isinstance(ring, type(cyclo_ring(5))):
        coeff = st.lists(st.integers(-5, 5), min_size=ring.degree, max_size=ring.degree).map(ring.element)
    elif ring == QQ:
        coeff = st.fractions(min_value=-9, max_value=9, max_denominator=5)
    else:
        coeff = st.integers(-10 ** 12, 10 ** 12)
    return st.tuples(st.integers(min_val, 3), st.lists(coeff, min_size=1, max_size=14)).map(build)


@pytest.mark.parametrize("ring", RINGS, ids=str)
@given(data=st.data())
def test_mul_associative_and_commutative(ring, data):
    a, b, c = (data.draw(series(ring)) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c


@given(series(ZZ), series(ZZ))
def test_kronecker_matches_schoolbook(a, b):
    prod = a * b
    for n in range(prod.val, prod.trunc + 1):
        want = sum(a[i] * b[n - i] for i in range(a.val, n - b.val + 1) if i <= a.trunc and n - i <= b.trunc)
        assert prod[n] == want


@given(series(QQ), series(QQ))
def test_leibniz_rule(a, b):
    assert (a * b).delta() == a.delta() * b + a * b.delta()


@given(series(QQ))
def test_inverse(a):
    if a.valuation() is None or a.valuation() > a.trunc - 1:
        return
    a = a.truncate(a.trunc)
    inv = a.invert()
    one = a * inv
    assert one[0] == 1 and all(one[n] == 0 for n in range(1, one.trunc + 1))


@pytest.mark.parametrize("ring", RINGS, ids=str)
@given(data=st.data())
def test_text_round_trip(ring, data):
    a = data.draw(series(ring, min_val=-3))
    b = QSeries.from_text(a.to_text())
    assert b.ring == a.ring and b.val == a.val and b.trunc == a.trunc and b.coeffs == a.coeffs


@given(series(ZZ), st.integers(2, 5))
def test_u_after_rescale_is_identity(a, k):
    if a.val < 0:
        return
    assert forms.u_operator(a.rescale(k), k) == a


@given(series(ZZ), st.sampled_from([5, 7, 11, 13]))
def test_u_star_partitions_the_indices(a, ell):
    parts = [forms.u_star(a, eps, ell) for eps in (-1, 0, 1)]
    assert parts[0] + parts[1] + parts[2] == a
    for n in range(a.val, a.trunc + 1):
        assert sum(1 for p in parts if p[n] != 0) <= 1


@given(series(ZZ), st.integers(1, 6), st.integers(0, 5))
def test_extract_progression(a, A, B):
    s = a.extract_progression(A, B)
    for n in range(s.val, s.trunc + 1):
        assert s[n] == a[A * n + B]


def test_precision_is_tracked():
    a = forms.partition_series(10)
    b = forms.partition_series(5)
    assert (a * b).trunc == 5
    with pytest.raises(PrecisionError):
        _ = b[6]
    with pytest.raises(PrecisionError):
        b.truncate(7)
    with pytest.raises(RingMismatchError):
        _ = a + a.change_ring(QQ)


def test_laurent_valuation_and_division():
    q = QSeries.monomial(1, 1, ZZ, 10)
    x = QSeries(ZZ, -2, [1, 1, 1], 6)
    y = x * q
    # relative precision: min(6 + 1, 10 - 2)
    assert y.val == -1 and y.trunc == 7
    assert (y / x).agrees_with(q.truncate(9), through=5)


def test_wq_rank_specialization_at_one_is_partitions():
    from quasirank.moments import rank_gf_lambert

    R = rank_gf_lambert(20)
    assert R.specialize(1) == forms.partition_series(20, QQ)


@given(st.integers(1, 4), st.integers(-3, 3))
def test_wq_division_inverts_multiplication(qexp, wexp):
    W = WQSeries.constant(ZZ, 12, {0: 1, 2: -1})
    back = W.div_one_minus(wexp, qexp).mul_one_minus(wexp, qexp)
    assert back.agrees_with(W)


def test_wq_delta_operators():
    W = WQSeries(ZZ, [{0: 1}, {1: 2, -1: 3}, {2: 5}], 2)
    assert W.delta_w().row(1) == {1: 2, -1: -3}
    assert W.delta_q().row(2) == {2: 10}
    assert W.moment(2)[1] == 5
