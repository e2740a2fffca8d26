from fractions import Fraction

import pytest

from flopdt.curves import (
    FlopCurveData,
    bracket,
    check_par_equals_n,
    n_invariant,
    n_invariant_from_recursion,
    par_series_euler,
)
from flopdt.errors import DomainError, UsageError

from oracles import divisor_sum_n


@pytest.mark.parametrize("ns", [(1,), (2,), (1, 1), (3, 0, 1), (1, 2, 2, 1)])
def test_n_invariant_matches_divisor_sum(ns):
    data = FlopCurveData(len(ns), ns)
    for m in range(1, 13):
        for n in range(-12, 13):
            assert n_invariant(n, m, data) == divisor_sum_n(n, m, ns)
            assert n_invariant_from_recursion(n, m, data) == divisor_sum_n(n, m, ns)


def test_conifold_invariants():
    data = FlopCurveData(1, (1,))
    assert n_invariant(0, 6, data) == Fraction(1, 36)
    assert n_invariant(4, 2, data) == Fraction(1, 4)
    assert n_invariant(2, 4, data) == 0
    assert n_invariant(5, 1, data) == 1


def test_bracket_sign():
    assert [bracket(h) for h in (1, 2, 3, 4)] == [1, -2, 3, -4]


@pytest.mark.parametrize("mu", [0, Fraction(1, 2), 1, Fraction(4, 3), 2])
@pytest.mark.parametrize("ns,hc", [((1,), 1), ((2,), 2), ((1, 2), 1), ((2, 1, 1), 2)])
def test_par_equals_exp_n(ns, hc, mu):
    r = check_par_equals_n(FlopCurveData(len(ns), ns, h_dot_c=hc), mu, 5)
    assert r and r.compared > 0


def test_par_euler_is_fn():
    s = par_series_euler(3, 1, 10)
    assert len(s) == 4
    assert par_series_euler(3, Fraction(1, 2), 10) == par_series_euler(3, Fraction(1, 2), 10)


def test_invalid_data():
    with pytest.raises(DomainError):
        FlopCurveData(7, (1,) * 7)
    with pytest.raises(DomainError):
        FlopCurveData(2, (1,))
    with pytest.raises(DomainError):
        FlopCurveData(1, (2,), width=3)
    with pytest.raises(UsageError):
        FlopCurveData(2, (1, 1), width=1)
    with pytest.raises(UsageError):
        FlopCurveData(2, (1, 1)).euler_width()
    with pytest.raises(DomainError):
        n_invariant(1, 0, FlopCurveData(1, (1,)))
