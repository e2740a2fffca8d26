from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from flopdt.errors import DomainError, PrecisionError, UsageError
from flopdt.series import (
    INF,
    ExponentLattice,
    FormalSeries,
    compare_series,
    series_add,
    series_coefficient,
    series_exp,
    series_int_pow,
    series_inverse_unit,
    series_log,
    series_mul,
    series_one,
    series_truncate,
)

from oracles import mercator_log, poly_mul

LAT = ExponentLattice(1, 2, 24, Fraction(1), (Fraction(1, 2),))


def to_plain(a):
    lat = a.lattice
    return {(lat.q_exp(k), lat.t_exp(k)[0]): c.to_fraction() for k, c in a.terms.items()}


def from_plain(d, valid_to=INF):
    return FormalSeries(LAT, {LAT.key(q, (t,)): v for (q, t), v in d.items()}, valid_to)


def grade(k):
    return k[0] + k[1] / 2


monomials = st.tuples(
    st.integers(0, 8).map(lambda n: Fraction(n, 4)),
    st.integers(-4, 4).map(lambda n: Fraction(n, 2)),
)
coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4).filter(bool)
plain = st.dictionaries(monomials, coeffs, max_size=6)
positive = st.dictionaries(monomials.filter(lambda k: grade(k) > 0), coeffs, max_size=5)


@settings(max_examples=60)
@given(plain, plain)
def test_mul_matches_convolution(a, b):
    got = to_plain(series_mul(from_plain(a), from_plain(b)))
    assert got == poly_mul(a, b)


@settings(max_examples=60)
@given(plain, plain)
def test_add_and_commutativity(a, b):
    x, y = from_plain(a), from_plain(b)
    assert series_add(x, y) == series_add(y, x)
    expected = dict(a)
    for k, v in b.items():
        expected[k] = expected.get(k, 0) + v
    assert to_plain(series_add(x, y)) == {k: v for k, v in expected.items() if v}


@settings(max_examples=40, deadline=None)
@given(positive)
def test_log_matches_mercator(h):
    order = Fraction(3)
    one_plus = series_add(series_one(LAT, order), from_plain(h, order))
    got = to_plain(series_log(one_plus))
    assert got == mercator_log(h, order, grade)


@settings(max_examples=40, deadline=None)
@given(positive)
def test_exp_log_round_trip(h):
    h = from_plain(h, Fraction(3))
    assert compare_series(series_log(series_exp(h)), h)


@settings(max_examples=40, deadline=None)
@given(positive, st.integers(-3, 4))
def test_int_pow_matches_repeated_product(h, e):
    order = Fraction(3)
    u = series_add(series_one(LAT, order), from_plain(h, order))
    ref = series_one(LAT, order)
    base = u if e >= 0 else series_inverse_unit(u)
    for _ in range(abs(e)):
        ref = series_mul(ref, base)
    assert compare_series(series_int_pow(u, e), ref)


def test_validity_propagation():
    a = FormalSeries(LAT, {LAT.key(0): 1, LAT.key(1): 2}, Fraction(2))
    b = FormalSeries(LAT, {LAT.key(Fraction(1, 2)): 1}, Fraction(1))
    p = series_mul(a, b)
    assert p.valid_to == Fraction(1)
    assert series_coefficient(p, LAT.key(Fraction(1, 2))) == 1
    with pytest.raises(PrecisionError):
        series_coefficient(p, LAT.key(2))


def test_truncation_drops_terms_and_lowers_validity():
    a = from_plain({(Fraction(0), Fraction(0)): 1, (Fraction(2), Fraction(0)): 1})
    t = series_truncate(a, 1)
    assert t.valid_to == 1 and len(t) == 1


def test_negative_grades_are_allowed_in_products():
    a = from_plain({(Fraction(0), Fraction(-1)): 1, (Fraction(0), Fraction(0)): 1}, Fraction(2))
    sq = series_mul(a, a)
    assert sq.get(LAT.key(0, (-2,))) == 1
    assert sq.valid_to == Fraction(3, 2)


def test_domain_errors():
    with pytest.raises(DomainError):
        series_exp(from_plain({(Fraction(0), Fraction(0)): 1}, 2))
    with pytest.raises(DomainError):
        series_log(from_plain({(Fraction(1), Fraction(0)): 1}, 2))


def test_lattice_mismatch_is_rejected():
    other = ExponentLattice(1, 3, 24, Fraction(1), (Fraction(1, 2),))
    with pytest.raises(UsageError):
        series_mul(series_one(LAT), series_one(other))
    with pytest.raises(UsageError):
        LAT.key(Fraction(1, 48))


def test_inverse_unit():
    u = from_plain({(Fraction(0), Fraction(0)): 2, (Fraction(1, 4), Fraction(1)): -1}, Fraction(4))
    inv = series_inverse_unit(u)
    assert compare_series(series_mul(u, inv), series_one(LAT, 4))
