"""Flop transformation of DT generating series.

The target side carries the class C-dagger in lattice direction
``c_index``; the source side is the same lattice with that direction
negated, so the variable change on curve classes is a sign flip there.
Error terms are expanded in the target chamber -1/l < w < 0 by default;
a reversed geometry lives in 0 < w < 1/l.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from fractions import Fraction
from math import lcm

from .curves import FlopCurveData, bracket, n_invariant
from .cyclotomic import exp_i_pi
from .errors import ChamberError, PrecisionError, UsageError
from .modular import ThetaArgument, _merge_streams, eta_series, fn_poly, theta_min_grade, theta_sum
from .series import (
    INF,
    ExponentLattice,
    FormalSeries,
    compare_series,
    series_elliptic_shift,
    series_exp,
    series_int_pow,
    series_inverse_unit,
    series_monomial,
    series_mul,
    series_one,
    series_product_stream,
    series_scale,
    series_substitute_lattice,
    series_truncate,
)

__all__ = [
    "VARIANTS",
    "GeometryConfig",
    "DTSeries",
    "psi0",
    "psi1",
    "phi_pushforward",
    "error_term_behrend",
    "error_term_euler",
    "error_term_cyclotomic_euler",
    "error_term",
    "flop_transform",
    "hat_dt_relation",
    "n_factorized_multiplier",
    "EllipticCheck",
    "elliptic_index",
    "elliptic_index_check",
]

VARIANTS = ("behrend", "euler", "fixed_support")


def target_lattice(l: int, rank: int = 1, c_index: int = 0, w_c=None, others=None) -> ExponentLattice:
    w_c = Fraction(-1, 2 * l) if w_c is None else Fraction(w_c)
    w = list(others) if others is not None else [Fraction(0)] * rank
    w[c_index] = w_c
    return ExponentLattice(rank, 2, 24, Fraction(1), tuple(w))


@dataclass(frozen=True)
class GeometryConfig:
    curve: FlopCurveData
    lattice: ExponentLattice = None
    c_index: int = 0
    order: Fraction = Fraction(4)
    label: str = "P"

    def __post_init__(self):
        if self.lattice is None:
            object.__setattr__(self, "lattice", target_lattice(self.curve.l))
        object.__setattr__(self, "order", Fraction(self.order))
        lat = self.lattice
        if not 0 <= self.c_index < lat.rank:
            raise UsageError(f"c_index {self.c_index} outside lattice rank {lat.rank}")
        w = lat.w_t[self.c_index] / lat.w_q
        # every factor (1 - s q^n t^(+-j)), n >= 1, j <= l must be positively graded
        if not (w != 0 and abs(w) < Fraction(1, self.curve.l)):
            raise ChamberError(
                f"C-weight {lat.w_t[self.c_index]} outside the admissible chamber 0 < |w| < 1/{self.curve.l}"
            )

    @property
    def p_dot_c(self) -> int:
        return self.curve.p_dot_c

    @property
    def s(self) -> int:
        pc = self.p_dot_c
        return (pc < 0) - (pc > 0)

    @property
    def source_lattice(self) -> ExponentLattice:
        w = list(self.lattice.w_t)
        w[self.c_index] = -w[self.c_index]
        return self.lattice.with_weights(w_t=w)

    def reversed(self) -> "GeometryConfig":
        """Geometry seen from the other side of the flop."""
        curve = replace(self.curve, p_dot_c=-self.p_dot_c)
        return replace(self, curve=curve, lattice=self.source_lattice)

    def cyclotomic_order(self, variant: str = "behrend") -> int:
        order = lcm(4, 2 * self.lattice.t_denominator)
        if variant in ("euler", "cyclotomic") and self.curve.l == 1:
            order = lcm(order, 2 * (self.curve.euler_width() + 1))
        return order

    def t_vector(self, j) -> tuple:
        v = [Fraction(0)] * self.lattice.rank
        v[self.c_index] = Fraction(j)
        return tuple(v)


@dataclass(frozen=True)
class DTSeries:
    series: FormalSeries
    divisor_label: str = "P"


def psi0(cfg: GeometryConfig) -> Fraction:
    d = cfg.curve
    return -Fraction(sum(j * d.n_j(j) for j in range(1, d.l + 1)) * cfg.p_dot_c, 12)


def psi1(cfg: GeometryConfig) -> Fraction:
    """Coefficient of C-dagger."""
    d = cfg.curve
    return -Fraction(sum(j * j * d.n_j(j) for j in range(1, d.l + 1)) * cfg.p_dot_c, 2)


def _flip_matrix(rank: int, c_index: int) -> list:
    return [[(-1 if i == c_index else 1) * int(i == j) for j in range(rank)] for i in range(rank)]


def phi_pushforward(dt, cfg: GeometryConfig):
    """Negate the C-component of every t-exponent (an involution)."""
    s = dt.series if isinstance(dt, DTSeries) else dt
    if s.lattice.rank != cfg.lattice.rank:
        raise UsageError(f"series has rank {s.lattice.rank}, geometry expects {cfg.lattice.rank}")
    out = series_substitute_lattice(s, 0, _flip_matrix(s.lattice.rank, cfg.c_index))
    return DTSeries(out, dt.divisor_label) if isinstance(dt, DTSeries) else out


# -- error terms -------------------------------------------------------------


def _lift_q(a: FormalSeries, lattice: ExponentLattice) -> FormalSeries:
    terms = {(k[0],) + (0,) * lattice.rank: c for k, c in a.terms.items()}
    return FormalSeries(lattice, terms, a.valid_to)


def _eta_inverse(order, lattice: ExponentLattice) -> FormalSeries:
    order = max(Fraction(order), -lattice.w_q / 24)
    return series_inverse_unit(_lift_q(eta_series(order + lattice.w_q / 12), lattice), valid_to=order)


def _theta_over_eta(lat: ExponentLattice, arg: ThetaArgument, order, scale=1) -> FormalSeries:
    """scale * theta_{1,1}(q, arg) / eta(q), exact to ``order``."""
    theta_min = theta_min_grade(arg, lat)
    theta = series_scale(theta_sum(1, 1, arg, order + lat.w_q / 24, lat), scale)
    return series_truncate(series_mul(theta, _eta_inverse(order - theta_min, lat)), order)


def _power_product(factors, order) -> FormalSeries:
    """prod_j build_j(o_j)^e_j exact to ``order``.

    ``factors`` holds (lead_grade, exponent, build); the order each factor
    needs follows from the leading grades, so nothing is recomputed.
    """
    total = sum(e * g for g, e, _ in factors)
    result = None
    for g, e, build in factors:
        f = build(order - total + g)
        p = series_int_pow(f, e, valid_to=order - total + e * g)
        result = p if result is None else series_mul(result, p)
    return series_truncate(result, order)


def _behrend_argument(cfg: GeometryConfig, j: int, shift) -> ThetaArgument:
    # phi_*P . C-dagger = -P.C
    return ThetaArgument(twist=-j * cfg.p_dot_c, direction=cfg.t_vector(1), scale=j, q_power=shift)


def error_term_behrend(cfg: GeometryConfig, order=None, shift=0) -> FormalSeries:
    """Behrend-weighted error term; ``shift`` evaluates it at t -> q^shift t.

    prod_j { i^(j P.C - 1) eta^-1 theta_{1,1}(q, ((-1)^(phi_*P) t)^(j C-dagger)) }^(j n_j P.C)
    """
    order = cfg.order if order is None else Fraction(order)
    lat = cfg.lattice
    d = cfg.curve
    pc = cfg.p_dot_c
    factors = []
    for j in range(1, d.l + 1):
        e = j * d.n_j(j) * pc
        if e == 0:
            continue
        arg = _behrend_argument(cfg, j, shift)
        g = theta_min_grade(arg, lat) - lat.w_q / 24
        unit = exp_i_pi(Fraction(j * pc - 1, 2))
        factors.append((g, e, lambda o, arg=arg, unit=unit: _theta_over_eta(lat, arg, o, unit)))
    if not factors:
        return series_one(lat, order)
    return _power_product(factors, order)


def _euler_base(cfg: GeometryConfig, order, shift=0) -> FormalSeries:
    """q^(n/12) t^(n/2) prod_{m>0} f_n(q^m t) prod_{m>=0} f_n(q^m t^-1).

    With ``shift`` = k the variable t is replaced by q^k t.
    """
    lat = cfg.lattice
    head = _euler_head(cfg, shift)

    def stream(sign, start):
        n = cfg.curve.euler_width()
        for m in itertools.count(start):
            key = lat.key(m, cfg.t_vector(sign))
            yield lat.grade(key), fn_poly(n, key, lat)

    prod = series_product_stream(
        _merge_streams(stream(1, 1 + shift), stream(-1, 1)), order - head.min_grade, lat
    )
    return series_truncate(series_mul(head, prod), order)


def _euler_head(cfg: GeometryConfig, shift) -> FormalSeries:
    lat = cfg.lattice
    n = cfg.curve.euler_width()
    head = series_monomial(lat, lat.key(Fraction(n, 12) + Fraction(n * shift, 2), cfg.t_vector(Fraction(n, 2))))
    # factors that may be non-positively graded are multiplied exactly
    for m in range(-shift, 1):
        head = series_mul(head, fn_poly(n, lat.key(m, cfg.t_vector(-1)), lat))
    return head


def error_term_euler(cfg: GeometryConfig, order=None, shift=0) -> FormalSeries:
    order = cfg.order if order is None else Fraction(order)
    lat = cfg.lattice
    pc = cfg.p_dot_c
    cfg.curve.euler_width()
    if pc == 0:
        return series_one(lat, order)
    g = _euler_head(cfg, shift).min_grade
    return _power_product([(g, pc, lambda o: _euler_base(cfg, o, shift))], order)


def error_term_cyclotomic_euler(cfg: GeometryConfig, order=None, shift=0) -> FormalSeries:
    """prod_{j=1}^n (-eta^-1 theta_{1,1}(q, xi^j t))^(P.C), xi = e^(2 pi i/(n+1))."""
    order = cfg.order if order is None else Fraction(order)
    lat = cfg.lattice
    pc = cfg.p_dot_c
    n = cfg.curve.euler_width()
    if pc == 0:
        return series_one(lat, order)
    factors = []
    for j in range(1, n + 1):
        arg = ThetaArgument(twist=Fraction(2 * j, n + 1), direction=cfg.t_vector(1), q_power=shift)
        g = theta_min_grade(arg, lat) - lat.w_q / 24
        factors.append((g, pc, lambda o, arg=arg: _theta_over_eta(lat, arg, o, -1)))
    return _power_product(factors, order)


def error_term(cfg: GeometryConfig, variant: str = "behrend", order=None, shift=0) -> FormalSeries:
    if variant in ("behrend", "fixed_support", "fixed-support"):
        return error_term_behrend(cfg, order, shift)
    if variant == "euler":
        return error_term_euler(cfg, order, shift)
    if variant == "cyclotomic":
        return error_term_cyclotomic_euler(cfg, order, shift)
    raise UsageError(f"unknown variant {variant!r}")


def flop_transform(dt: DTSeries, cfg: GeometryConfig, variant: str = "behrend", inverse: bool = False) -> DTSeries:
    """DT-dagger(phi_*P) = phi_*DT(P) * E; with ``inverse`` recover DT(P).

    Forward input lives on the source lattice, inverse input on the target.
    """
    s = dt.series if isinstance(dt, DTSeries) else dt
    label = dt.divisor_label if isinstance(dt, DTSeries) else cfg.label
    want = cfg.lattice if inverse else cfg.source_lattice
    if s.lattice != want:
        raise UsageError("input series is not graded by the expected side of the flop")
    span = s.valid_to - s.min_grade if s.valid_to != INF else cfg.order
    order = min(cfg.order, s.valid_to) if s.valid_to != INF else cfg.order
    if inverse:
        err = error_term(cfg, variant, order + max(span, 0))
        e_inv = series_inverse_unit(err)
        out = phi_pushforward(series_mul(s, e_inv), cfg)
    else:
        pushed = phi_pushforward(s, cfg)
        if pushed.is_zero():
            return DTSeries(pushed, label)
        err = error_term(cfg, variant, pushed.valid_to - pushed.min_grade)
        out = series_mul(pushed, err)
    return DTSeries(out, label)


# -- hat relation and the factorisation through N ------------------------------------


def _n_sum(cfg: GeometryConfig, lattice: ExponentLattice, t_sign: int, n_min: int, order, coeff) -> dict:
    """sum over m >= 1, n >= n_min of coeff(m) N_{n,m} q^n t^(t_sign m C)."""
    d = cfg.curve
    terms = {}
    step = lattice.grade(lattice.key(0, cfg.t_vector(t_sign)))
    for n in itertools.count(n_min):
        if n * lattice.w_q + min(step, 0) * d.l * max(n, 1) > order and n > 0:
            break
        m_max = d.l * n if n > 0 else None
        for m in itertools.count(1):
            if m_max is not None and m > m_max:
                break
            g = n * lattice.w_q + m * step
            if g <= 0:
                raise ChamberError("N-weighted sum has non-positively graded terms in this chamber")
            if g > order:
                if step > 0:
                    break
                continue
            c = n_invariant(n, m, d) * coeff(m)
            if c:
                terms[lattice.key(n, cfg.t_vector(t_sign * m))] = c
        if n_min == 0 and n == 0 and step <= 0:
            raise ChamberError("the n = 0 slice needs t^(-C) positively graded")
    return terms


def hat_dt_relation(dt: DTSeries, cfg: GeometryConfig, side: str = "zero") -> DTSeries:
    """Multiply by exp(sum N_{n,m} <P, mC> q^n t^(-mC)); n > 0 or n >= 0."""
    if side not in ("zero", "minus_one"):
        raise UsageError("side must be 'zero' or 'minus_one'")
    s = dt.series if isinstance(dt, DTSeries) else dt
    lat = s.lattice
    pc = cfg.p_dot_c
    order = s.valid_to - s.min_grade if s.valid_to != INF else cfg.order
    terms = _n_sum(cfg, lat, -1, 1 if side == "zero" else 0, order, lambda m: bracket(m * pc))
    mult = series_exp(FormalSeries(lat, terms, order), valid_to=order)
    out = series_mul(s, mult)
    return DTSeries(out, dt.divisor_label) if isinstance(dt, DTSeries) else out


def n_factorized_multiplier(cfg: GeometryConfig, order=None) -> FormalSeries:
    """q^(-psi0) t^(-psi1) / M with M the exponential of N-weighted sums.

    M collects <phi_*P, mC-dagger> N q^n t^(mC-dagger) over n > 0 and the
    same with t^(-mC-dagger) over n >= 0.
    """
    order = cfg.order if order is None else Fraction(order)
    lat = cfg.lattice
    pc = cfg.p_dot_c
    if pc == 0:
        return series_one(lat, order)
    lead = series_monomial(lat, lat.key(-psi0(cfg), cfg.t_vector(-psi1(cfg))))
    inner = order - lead.min_grade
    coeff = lambda m: bracket(-m * pc)  # phi_*P . mC-dagger = -m P.C
    terms = _n_sum(cfg, lat, 1, 1, inner, coeff)
    for k, c in _n_sum(cfg, lat, -1, 0, inner, coeff).items():
        terms[k] = terms.get(k, 0) + c
    exponent = FormalSeries(lat, {k: -c for k, c in terms.items()}, inner)
    return series_truncate(series_mul(lead, series_exp(exponent, valid_to=inner)), order)


# -- elliptic law ----------------------------------------------------------------


def elliptic_index(cfg: GeometryConfig, variant: str = "behrend") -> Fraction:
    d = cfg.curve
    if variant == "euler":
        return Fraction(d.euler_width() * cfg.p_dot_c, 2)
    return Fraction(sum(j**3 * d.n_j(j) for j in range(1, d.l + 1)) * cfg.p_dot_c, 2)


@dataclass
class EllipticCheck:
    index: Fraction
    agree: bool
    compared: int
    mismatch: tuple | None = None
    regraded: bool = False  # also confirmed through the regraded t -> q t shift

    def __bool__(self):
        return self.agree


def elliptic_index_check(cfg: GeometryConfig, variant: str = "behrend", order=None) -> EllipticCheck:
    """q^m t^2m E(q, q t) = E(q, t), both sides expanded in the same chamber.

    E(q, q t) is obtained by translating the elliptic arguments inside the
    defining product.  When E has no poles in t (P.C >= 0) its expansion is
    chamber independent, and the law is also confirmed by regrading the
    series itself.
    """
    order = cfg.order if order is None else Fraction(order)
    lat = cfg.lattice
    m = elliptic_index(cfg, variant)
    norm = series_monomial(lat, lat.key(m, cfg.t_vector(2 * m)))
    err = error_term(cfg, variant, order)
    shifted = error_term(cfg, variant, order - norm.min_grade, shift=1)
    lhs = series_truncate(series_mul(norm, shifted), order)
    cmp = compare_series(lhs, err)
    if cmp.compared == 0:
        raise PrecisionError("order too small to compare any coefficient of the elliptic law")
    regraded = False
    if cmp.agree and cfg.p_dot_c >= 0:
        moved = series_elliptic_shift(err, cfg.c_index)
        norm_moved = series_monomial(moved.lattice, moved.lattice.key(m, cfg.t_vector(2 * m)))
        alt = compare_series(series_mul(norm_moved, moved), err)
        if not alt.agree:
            return EllipticCheck(m, False, alt.compared, alt.mismatch)
        regraded = alt.compared > 0
    return EllipticCheck(m, cmp.agree, cmp.compared, cmp.mismatch, regraded)
