"""Blow-up formula for rank r DT-type series on surfaces.

The blown-up series is read off a two-variable product; cell (a, s) is
the coefficient of q^(r/12 + a/2 + s) t^(a + r/2).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ConsistencyError, DomainError, UsageError
from .modular import Q_LATTICE, ThetaArgument, eta_series, theta_a_series, theta_sum
from .series import (
    ExponentLattice,
    FormalSeries,
    compare_series,
    series_coefficient,
    series_int_pow,
    series_inverse_unit,
    series_monomial,
    series_mul,
    series_one,
    series_t_slice,
    series_truncate,
)

__all__ = [
    "BLOWUP_LATTICE",
    "SurfaceDTSeries",
    "blowup_error",
    "blowup_transform",
    "blowup_cell",
    "blowup_cells",
    "RankTwoCheck",
    "rank2_theta_quotient_check",
]

# t is the exceptional class; ungraded so that theta_{1,0} is symmetric
BLOWUP_LATTICE = ExponentLattice(rank=1, t_denominator=2, q_denominator=24, w_q=Fraction(1), w_t=(Fraction(0),))


@dataclass(frozen=True)
class SurfaceDTSeries:
    rank: int
    series: FormalSeries
    label: str = "l"

    def __post_init__(self):
        if self.rank < 0:
            raise DomainError("rank must be non-negative")
        if self.series.lattice.rank != 0:
            raise UsageError("surface DT series must be a series in q alone")


def _lift(a: FormalSeries, lattice: ExponentLattice = BLOWUP_LATTICE) -> FormalSeries:
    terms = {(k[0],) + (0,) * lattice.rank: c for k, c in a.terms.items()}
    return FormalSeries(lattice, terms, a.valid_to)


def blowup_error(r: int, order, lattice: ExponentLattice = BLOWUP_LATTICE) -> FormalSeries:
    """eta(q)^-r theta_{1,0}(q, t)^r, exact to ``order``."""
    order = Fraction(order)
    if r < 0:
        raise DomainError("rank must be non-negative")
    if r == 0:
        return series_one(lattice, order)
    arg = ThetaArgument(direction=(1,))
    # theta_{1,0}/eta starts at grade 1/12; the power needs (r-1)/12 less
    base_order = order - Fraction(r - 1, 12)
    theta = theta_sum(1, 0, arg, base_order + Fraction(1, 24), lattice)
    eta = _lift(eta_series(base_order - Fraction(1, 8) + Fraction(1, 12)), lattice)
    base = series_mul(theta, series_inverse_unit(eta, valid_to=base_order - Fraction(1, 8)))
    return series_truncate(series_int_pow(base, r), order)


def blowup_transform(data: SurfaceDTSeries, order) -> FormalSeries:
    """(sum_s DT(r, l, -s) q^s) * eta^-r theta_{1,0}^r."""
    order = Fraction(order)
    s = data.series
    if s.is_zero():
        return FormalSeries(BLOWUP_LATTICE, {}, min(order, s.valid_to))
    err_order = order - s.min_grade
    err = blowup_error(data.rank, err_order)
    return series_truncate(series_mul(_lift(s), err), order)


def _cell_key(r: int, a: int, s):
    q = Fraction(r, 12) + Fraction(a, 2) + Fraction(s)
    t = Fraction(a) + Fraction(r, 2)
    return BLOWUP_LATTICE.key(q, (t,))


def blowup_cell(product: FormalSeries, r: int, a: int, s) -> Fraction:
    """DT-dagger(r, g^*l - aC, -s), read off the transformed series."""
    if Fraction(a).denominator != 1:
        raise ConsistencyError(f"cell index a must be an integer, got {a}")
    c = series_coefficient(product, _cell_key(r, int(a), s))
    return c.to_fraction()


def blowup_cells(product: FormalSeries, r: int) -> dict:
    """Every stored coefficient as {(a, s): value}; exponents off the grid are an error."""
    out = {}
    for key, c in product.terms.items():
        q = BLOWUP_LATTICE.q_exp(key)
        t = BLOWUP_LATTICE.t_exp(key)[0]
        a = t - Fraction(r, 2)
        if a.denominator != 1:
            raise ConsistencyError(f"t-exponent {t} does not lie on the rank {r} grid")
        s = q - Fraction(r, 12) - a / 2
        out[(int(a), s)] = c.to_fraction()
    return dict(sorted(out.items()))


@dataclass
class RankTwoCheck:
    a: int
    agree: bool
    compared: int
    slice_identity: bool
    mismatch: tuple | None = None

    def __bool__(self):
        return self.agree and self.slice_identity


def rank2_theta_quotient_check(order, a_values=(0, 1)) -> list:
    """Rank two: the t^(a+1) column of eta^-2 theta_{1,0}^2 against theta_a.

    Two identities per a: the column of theta_{1,0}^2 equals
    q^((a+1)^2/4) theta_a, and after removing q^(1/6 + a/2 + a^2/4) the
    column of the full error factor equals q^(1/12) theta_a / eta^2.
    """
    order = Fraction(order)
    reports = []
    arg = ThetaArgument(direction=(1,))
    for a in a_values:
        if a not in (0, 1):
            raise UsageError("a must be 0 or 1")
        shift = Fraction(1, 6) + Fraction(a, 2) + Fraction(a * a, 4)
        col_theta = series_t_slice(series_int_pow(theta_sum(1, 0, arg, order + 1, BLOWUP_LATTICE), 2), 0, a + 1)
        target = series_mul(series_monomial(Q_LATTICE, Q_LATTICE.key(Fraction((a + 1) ** 2, 4))), theta_a_series(a, order))
        slice_ok = compare_series(series_truncate(col_theta, order), series_truncate(target, order))

        col = series_t_slice(blowup_error(2, order + shift + 1), 0, a + 1)
        left = series_truncate(series_mul(series_monomial(Q_LATTICE, Q_LATTICE.key(-shift)), col), order)
        eta_inv2 = series_int_pow(series_inverse_unit(eta_series(order + 1), valid_to=order + 1), 2)
        right = series_mul(
            series_monomial(Q_LATTICE, Q_LATTICE.key(Fraction(1, 12))),
            series_mul(theta_a_series(a, order + 1), eta_inv2),
        )
        cmp = compare_series(left, series_truncate(right, order))
        reports.append(RankTwoCheck(a, cmp.agree, cmp.compared, slice_ok.agree, cmp.mismatch or slice_ok.mismatch))
    return reports
