from fractions import Fraction

import pytest

from flopdt.blowup import (
    BLOWUP_LATTICE,
    SurfaceDTSeries,
    blowup_cell,
    blowup_cells,
    blowup_error,
    blowup_transform,
    rank2_theta_quotient_check,
)
from flopdt.errors import ConsistencyError, DomainError, PrecisionError, UsageError
from flopdt.modular import Q_LATTICE, default_lattice
from flopdt.series import FormalSeries, compare_series, series_one

L = BLOWUP_LATTICE


def point(q=0, c=1, valid_to=4):
    return SurfaceDTSeries(2, FormalSeries(Q_LATTICE, {Q_LATTICE.key(q): c}, valid_to))


def test_rank_two_leading_terms():
    e = blowup_error(2, Fraction(1, 6))
    got = {L.t_exp(k)[0]: v.to_fraction() for k, v in e.terms.items()}
    assert got == {-1: 1, 0: 2, 1: 1}
    assert {L.q_exp(k) for k in e.terms} == {Fraction(1, 6)}


def test_rank_zero_and_one():
    assert blowup_error(0, 3) == series_one(L, 3)
    e1 = blowup_error(1, 2)
    assert {L.t_exp(k)[0] for k in e1.terms if L.q_exp(k) == Fraction(1, 12)} == {Fraction(-1, 2), Fraction(1, 2)}


def test_cells_of_rank_two():
    prod = blowup_transform(point(), 3)
    assert blowup_cell(prod, 2, 0, 0) == 1
    assert blowup_cell(prod, 2, -1, Fraction(1, 2)) == 2
    cells = blowup_cells(prod, 2)
    for (a, s), v in cells.items():
        # theta_{1,0}^2 is symmetric under t -> 1/t, i.e. a -> -2 - a
        assert cells.get((-2 - a, s + a + 1)) == v
    with pytest.raises(ConsistencyError):
        blowup_cell(prod, 2, Fraction(1, 2), 0)
    with pytest.raises(PrecisionError):
        blowup_cell(prod, 2, 0, 10)


def test_transform_is_multiplicative():
    a = point(0, 3)
    b = point(1, -2)
    both = SurfaceDTSeries(2, FormalSeries(Q_LATTICE, {Q_LATTICE.key(0): 3, Q_LATTICE.key(1): -2}, 4))
    lhs = blowup_transform(both, 3)
    rhs = FormalSeries(L, {}, 3)
    for part in (a, b):
        rhs = rhs + blowup_transform(part, 3)
    assert compare_series(lhs, rhs)


@pytest.mark.parametrize("order", [2, 6])
def test_rank_two_theta_quotient(order):
    reports = rank2_theta_quotient_check(order)
    assert [r.a for r in reports] == [0, 1]
    assert all(reports) and all(r.compared > 0 for r in reports)


def test_invalid_inputs():
    with pytest.raises(DomainError):
        blowup_error(-1, 2)
    with pytest.raises(UsageError):
        SurfaceDTSeries(2, series_one(default_lattice()))
    with pytest.raises(UsageError):
        rank2_theta_quotient_check(2, a_values=(2,))


def test_zero_input():
    out = blowup_transform(SurfaceDTSeries(1, FormalSeries(Q_LATTICE, {}, 2)), 3)
    assert out.is_zero() and out.valid_to == 2
