"""Dedekind eta, Jacobi theta functions and the polynomials f_n.

Branch convention: (-1)^r means e^(i pi r) for rational r.  A theta
argument carries its sign as an explicit twist c, so the elliptic
variable is x = (-1)^c t^v and x^y = e^(i pi c y) t^(v y).  Twists are
never folded into the series before expansion.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

from .cyclotomic import ONE, exp_i_pi, root_of_unity
from .errors import ChamberError, UsageError
from .series import (
    INF,
    ExponentLattice,
    FormalSeries,
    series_at_order,
    series_monomial,
    series_mul,
    series_one,
    series_product_stream,
    series_truncate,
)

__all__ = [
    "Q_LATTICE",
    "default_lattice",
    "ThetaArgument",
    "eta_series",
    "theta_sum",
    "theta_product",
    "theta_min_grade",
    "theta_a_series",
    "fn_poly",
    "fn_cyclotomic_product",
    "apply_twist",
]

Q_LATTICE = ExponentLattice(rank=0, w_t=())


def default_lattice(w_t=Fraction(-1, 2), *, q_denominator=24, t_denominator=2) -> ExponentLattice:
    """Rank-one lattice (q, t) used by the theta and flop kernels."""
    return ExponentLattice(1, t_denominator, q_denominator, Fraction(1), (Fraction(w_t),))


@dataclass(frozen=True)
class ThetaArgument:
    """Elliptic variable ((-1)^twist q^q_power t^direction)^scale.

    ``q_power`` is zero except when evaluating at q-translates.
    """

    twist: Fraction = Fraction(0)
    direction: tuple = (1,)
    scale: int = 1
    q_power: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "twist", Fraction(self.twist))
        object.__setattr__(self, "q_power", Fraction(self.q_power))
        object.__setattr__(self, "direction", tuple(Fraction(x) for x in self.direction))
        if self.scale < 1:
            raise UsageError("theta scale must be a positive integer")

    @property
    def exponent(self) -> tuple:
        return tuple(self.scale * x for x in self.direction)

    @property
    def q_exponent(self) -> Fraction:
        return self.scale * self.q_power

    def twisted(self, c) -> "ThetaArgument":
        return replace(self, twist=self.twist + Fraction(c))

    def q_translated(self, k=1) -> "ThetaArgument":
        """Argument with t replaced by q^k t."""
        return replace(self, q_power=self.q_power + Fraction(k))


def _t_scaled(v: tuple, y: Fraction) -> tuple:
    return tuple(x * y for x in v)


def _check_rank(lattice: ExponentLattice, arg: ThetaArgument):
    if len(arg.direction) != lattice.rank:
        raise UsageError(f"theta direction has length {len(arg.direction)}, lattice rank is {lattice.rank}")


def _arg_grade(lattice: ExponentLattice, arg: ThetaArgument) -> Fraction:
    return lattice.grade(lattice.key(arg.q_exponent, arg.exponent))


def eta_series(order, lattice: ExponentLattice = Q_LATTICE) -> FormalSeries:
    """q^(1/24) prod_{k>=1} (1 - q^k), exact to grade ``order``."""
    order = Fraction(order)
    if order < 0:
        raise UsageError("eta order must be non-negative")
    lead = series_monomial(lattice, lattice.key(Fraction(1, 24)))

    def build(inner):
        def factors():
            for k in itertools.count(1):
                yield FormalSeries(lattice, {lattice.zero_key(): ONE, lattice.key(k): -ONE}, INF)

        prod = series_product_stream(factors(), inner - lattice.w_q / 24, lattice)
        return series_mul(lead, prod)

    return series_at_order(build, order)


def _window(w_q: Fraction, s: Fraction, offset: Fraction, bound: Fraction):
    """Integers k with w_q*x^2/2 + s*x <= bound, x = k + offset (exact)."""
    grade = lambda k: w_q * (k + offset) ** 2 / 2 + s * (k + offset)
    # the integer nearest the vertex minimises the convex parabola
    k0 = round(-s / w_q - offset)
    best = min((k0 - 1, k0, k0 + 1), key=grade)
    if grade(best) > bound:
        return []
    lo = hi = best
    while grade(lo - 1) <= bound:
        lo -= 1
    while grade(hi + 1) <= bound:
        hi += 1
    return list(range(lo, hi + 1))


def theta_sum(a: int, b: int, arg: ThetaArgument, order, lattice: ExponentLattice | None = None) -> FormalSeries:
    """sum_k q^((k+a/2)^2/2) ((-1)^b x)^(k+a/2), exact to grade ``order``."""
    if a not in (0, 1) or b not in (0, 1):
        raise UsageError("theta characteristics must be 0 or 1")
    lattice = lattice or default_lattice()
    _check_rank(lattice, arg)
    order = Fraction(order)
    v, u = arg.exponent, arg.q_exponent
    s = _arg_grade(lattice, arg)
    offset = Fraction(a, 2)
    terms = {}
    for k in _window(lattice.w_q, s, offset, order):
        y = k + offset
        key = lattice.key(y * y / 2 + u * y, _t_scaled(v, y))
        terms[key] = exp_i_pi((b + arg.twist) * y)
    return FormalSeries(lattice, terms, order)


def theta_min_grade(arg: ThetaArgument, lattice: ExponentLattice, a: int = 1) -> Fraction:
    """Smallest grade among the terms of theta_{a,b}(q, arg)."""
    _check_rank(lattice, arg)
    s = _arg_grade(lattice, arg)
    offset = Fraction(a, 2)
    k0 = round(-s / lattice.w_q - offset)
    return min(lattice.w_q * (k + offset) ** 2 / 2 + s * (k + offset) for k in (k0 - 1, k0, k0 + 1))


def _merge_streams(*streams):
    """Merge (grade, factor) generators, each sorted by grade, into one."""
    tagged = [((d, i, f) for d, f in s) for i, s in enumerate(streams)]
    return (f for _, _, f in heapq.merge(*tagged, key=lambda t: (t[0], t[1])))


def theta_product(arg: ThetaArgument, order, lattice: ExponentLattice | None = None) -> FormalSeries:
    """Triple-product form of theta_{1,1}:

    i q^(1/12) x^(1/2) eta(q) (1 - x^-1) prod_{n>=1} (1 - q^n x)(1 - q^n x^-1).
    """
    lattice = lattice or default_lattice()
    _check_rank(lattice, arg)
    v, u = arg.exponent, arg.q_exponent
    neg_v = tuple(-x for x in v)
    s = _arg_grade(lattice, arg)
    if abs(s) >= lattice.w_q:
        raise ChamberError(
            f"grade {s} of the elliptic variable must lie strictly inside (-w_q, w_q)"
        )
    c = arg.twist
    x_coeff, xinv_coeff = exp_i_pi(c), exp_i_pi(-c)
    zero = lattice.zero_key()

    def stream(sign_v, sign_u, coeff):
        for n in itertools.count(1):
            key = lattice.key(n + sign_u, sign_v)
            f = FormalSeries(lattice, {zero: ONE, key: -coeff}, INF)
            yield lattice.grade(key), f

    lead = series_monomial(
        lattice, lattice.key(Fraction(1, 12) + u / 2, _t_scaled(v, Fraction(1, 2))), exp_i_pi(Fraction(1, 2)) * exp_i_pi(c / 2)
    )
    edge = FormalSeries(lattice, {zero: ONE, lattice.key(-u, neg_v): -xinv_coeff}, INF)

    def build(inner):
        eta = eta_series(inner - lead.min_grade - edge.min_grade, lattice)
        prod = series_product_stream(
            _merge_streams(stream(v, u, x_coeff), stream(neg_v, -u, xinv_coeff)),
            inner - lead.min_grade - edge.min_grade - eta.min_grade,
            lattice,
        )
        return series_mul(series_mul(series_mul(lead, edge), eta), prod)

    return series_at_order(build, order)


def theta_a_series(a: int, order, lattice: ExponentLattice = Q_LATTICE) -> FormalSeries:
    """sum_k q^((k + a/2)^2), one variable."""
    if a not in (0, 1):
        raise UsageError("a must be 0 or 1")
    order = Fraction(order)
    offset = Fraction(a, 2)
    terms = {}
    for k in _window(2 * lattice.w_q, Fraction(0), offset, order):
        y = k + offset
        key = lattice.key(y * y)
        terms[key] = terms.get(key, 0) + 1
    return FormalSeries(lattice, terms, order)


def fn_poly(n: int, x: Sequence, lattice: ExponentLattice | None = None, coeff=1) -> FormalSeries:
    """f_n(c*m) = 1 + c*m + ... + (c*m)^n for a monomial key m; exact."""
    if n < 0:
        raise UsageError("n must be non-negative")
    lattice = lattice or default_lattice()
    x = tuple(x)
    terms = {}
    power = ONE
    for i in range(n + 1):
        key = tuple(i * e for e in x)
        terms[key] = power
        power = power * coeff
    return FormalSeries(lattice, terms, INF)


def fn_cyclotomic_product(n: int, x: Sequence, lattice: ExponentLattice | None = None, order=None) -> FormalSeries:
    """prod_{j=1}^{n} (1 - xi^j m) with xi = e^(2 pi i/(n+1)); exact."""
    if n < 0:
        raise UsageError("n must be non-negative")
    lattice = lattice or default_lattice()
    x = tuple(x)
    zero = lattice.zero_key()
    result = series_one(lattice)
    for j in range(1, n + 1):
        xi_j = root_of_unity(n + 1, j)
        result = series_mul(result, FormalSeries(lattice, {zero: ONE, x: -xi_j}, INF))
    if order is not None:
        result = series_truncate(result, order)
    return result


def apply_twist(a: FormalSeries, direction: int, c) -> FormalSeries:
    """Ring automorphism t_d^r -> e^(i pi c r) t_d^r."""
    lat = a.lattice
    c = Fraction(c)
    out = {}
    for key, v in a.terms.items():
        r = Fraction(key[1 + direction], lat.t_denominator)
        out[key] = v * exp_i_pi(c * r)
    return FormalSeries(lat, out, a.valid_to)
