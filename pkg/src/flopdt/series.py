"""Truncated Puiseux-Laurent series in q and a lattice of t-variables.

A series is a finite map from exponent keys to cyclotomic coefficients,
together with a rational bound ``valid_to``: every coefficient whose
grade is at most ``valid_to`` is exact, and nothing above it is stored.
The grade of a key is a linear functional fixed by the lattice, so
truncation is a single integer comparison once the functional has been
scaled to integer weights.

Keys are plain integer tuples ``(q_num, t_num_0, ..., t_num_{k-1})``; the
actual exponents are ``q_num / q_denominator`` and
``t_num_i / t_denominator``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

from .cyclotomic import ONE, CycNumber
from .errors import ChamberError, DomainError, PrecisionError, UsageError

INF = math.inf

__all__ = [
    "INF",
    "ExponentLattice",
    "ExponentKey",
    "FormalSeries",
    "SeriesComparison",
    "as_cyc",
    "series_monomial",
    "series_one",
    "series_zero",
    "series_from_terms",
    "series_add",
    "series_sub",
    "series_mul",
    "series_scale",
    "series_inverse_unit",
    "series_exp",
    "series_log",
    "series_int_pow",
    "series_substitute_lattice",
    "series_elliptic_shift",
    "series_product_stream",
    "series_coefficient",
    "series_truncate",
    "series_at_order",
    "series_t_slice",
    "compare_series",
]

ExponentKey = tuple  # (q_num, *t_nums)


def _frac(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("exponents and weights must be exact rationals, not floats")
    return Fraction(x)


def _bound_add(x, y):
    if x == INF or y == INF:
        return INF
    return x + y


def as_cyc(c) -> CycNumber:
    if isinstance(c, CycNumber):
        return c
    return CycNumber.rational(c)


@dataclass(frozen=True)
class ExponentLattice:
    """Exponent bookkeeping and the grading functional used for truncation.

    ``w_q`` must be positive; ``w_t`` has one rational weight per t-direction.
    """

    rank: int = 1
    t_denominator: int = 2
    q_denominator: int = 24
    w_q: Fraction = Fraction(1)
    w_t: tuple = (Fraction(-1, 2),)
    _scale: int = field(init=False, repr=False, compare=False)
    _gq: int = field(init=False, repr=False, compare=False)
    _gt: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.rank < 0:
            raise UsageError("lattice rank must be non-negative")
        if self.t_denominator < 1 or self.q_denominator < 1:
            raise UsageError("exponent denominators must be positive")
        w_q = _frac(self.w_q)
        w_t = tuple(_frac(w) for w in self.w_t)
        if w_q <= 0:
            raise ChamberError("the q-weight of the grading must be positive")
        if len(w_t) != self.rank:
            raise UsageError(f"expected {self.rank} t-weights, got {len(w_t)}")
        object.__setattr__(self, "w_q", w_q)
        object.__setattr__(self, "w_t", w_t)
        parts = [w_q / self.q_denominator] + [w / self.t_denominator for w in w_t]
        scale = reduce(math.lcm, (p.denominator for p in parts), 1)
        object.__setattr__(self, "_scale", scale)
        object.__setattr__(self, "_gq", int(parts[0] * scale))
        object.__setattr__(self, "_gt", tuple(int(p * scale) for p in parts[1:]))

    # -- keys --------------------------------------------------------------
    def key(self, q=0, t: Sequence = ()) -> ExponentKey:
        """Key for the monomial q^q t^t (rational exponents)."""
        t = tuple(t) if t else (0,) * self.rank
        if len(t) != self.rank:
            raise UsageError(f"t-exponent must have length {self.rank}")
        qn = _frac(q) * self.q_denominator
        if qn.denominator != 1:
            raise UsageError(f"q-exponent {q} not representable with q_denominator={self.q_denominator}")
        out = [int(qn)]
        for x in t:
            tn = _frac(x) * self.t_denominator
            if tn.denominator != 1:
                raise UsageError(
                    f"t-exponent {x} not representable with t_denominator={self.t_denominator}"
                )
            out.append(int(tn))
        return tuple(out)

    def zero_key(self) -> ExponentKey:
        return (0,) * (self.rank + 1)

    def q_exp(self, key) -> Fraction:
        return Fraction(key[0], self.q_denominator)

    def t_exp(self, key) -> tuple:
        return tuple(Fraction(x, self.t_denominator) for x in key[1:])

    def gint(self, key) -> int:
        g = self._gq * key[0]
        for w, x in zip(self._gt, key[1:]):
            g += w * x
        return g

    def grade(self, key) -> Fraction:
        return Fraction(self.gint(key), self._scale)

    def bound(self, valid_to) -> int | None:
        """Integer grade bound for ``valid_to`` (None means unbounded)."""
        if valid_to == INF:
            return None
        return math.floor(valid_to * self._scale)

    def to_grade(self, gint: int) -> Fraction:
        return Fraction(gint, self._scale)

    def same_exponents(self, other: "ExponentLattice") -> bool:
        return (
            self.rank == other.rank
            and self.t_denominator == other.t_denominator
            and self.q_denominator == other.q_denominator
        )

    def with_weights(self, w_q=None, w_t=None) -> "ExponentLattice":
        return ExponentLattice(
            rank=self.rank,
            t_denominator=self.t_denominator,
            q_denominator=self.q_denominator,
            w_q=self.w_q if w_q is None else w_q,
            w_t=self.w_t if w_t is None else tuple(w_t),
        )


def _kadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _ksub(a, b):
    return tuple(x - y for x, y in zip(a, b))


class FormalSeries:
    """Immutable truncated series over an :class:`ExponentLattice`."""

    __slots__ = ("lattice", "_terms", "valid_to", "_items", "_min")

    def __init__(self, lattice: ExponentLattice, terms: Mapping, valid_to=INF):
        if valid_to != INF:
            valid_to = _frac(valid_to)
        bound = lattice.bound(valid_to)
        clean = {}
        for key, c in terms.items():
            key = tuple(key)
            if len(key) != lattice.rank + 1:
                raise UsageError(f"key {key} does not match lattice rank {lattice.rank}")
            c = as_cyc(c)
            if c.is_zero():
                continue
            if bound is not None and lattice.gint(key) > bound:
                continue
            clean[key] = c
        self._init(lattice, clean, valid_to)

    def _init(self, lattice, terms, valid_to):
        self.lattice = lattice
        self._terms = terms
        self.valid_to = valid_to
        self._items = None
        self._min = None

    @classmethod
    def _raw(cls, lattice, terms, valid_to) -> "FormalSeries":
        obj = cls.__new__(cls)
        obj._init(lattice, terms, valid_to)
        return obj

    # -- views -------------------------------------------------------------
    @property
    def terms(self) -> Mapping:
        return MappingProxyType(self._terms)

    def items_by_grade(self) -> list:
        """``(key, gint, coeff)`` triples sorted by grade, then key."""
        if self._items is None:
            lat = self.lattice
            items = [(k, lat.gint(k), c) for k, c in self._terms.items()]
            items.sort(key=lambda it: (it[1], it[0]))
            self._items = items
        return self._items

    @property
    def min_grade(self):
        if self._min is None:
            items = self.items_by_grade()
            self._min = self.lattice.to_grade(items[0][1]) if items else INF
        return self._min

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return all(c.is_rational() for c in self._terms.values())

    def get(self, key) -> CycNumber:
        return self._terms.get(tuple(key), CycNumber.rational(0))

    def __len__(self):
        return len(self._terms)

    def __iter__(self) -> Iterator:
        return iter(self._terms)

    # -- operators -----------------------------------------------------------
    def __add__(self, other):
        return series_add(self, _lift(self, other))

    __radd__ = __add__

    def __sub__(self, other):
        return series_sub(self, _lift(self, other))

    def __rsub__(self, other):
        return series_sub(_lift(self, other), self)

    def __neg__(self):
        return series_scale(self, -1)

    def __mul__(self, other):
        if isinstance(other, FormalSeries):
            return series_mul(self, other)
        return series_scale(self, other)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return series_int_pow(self, e)

    def __eq__(self, other):
        if not isinstance(other, FormalSeries):
            return NotImplemented
        if self.lattice != other.lattice or self.valid_to != other.valid_to:
            return False
        if self._terms.keys() != other._terms.keys():
            return False
        return all(c == other._terms[k] for k, c in self._terms.items())

    __hash__ = None

    def __repr__(self):
        head = ", ".join(_fmt_term(self.lattice, k, c) for k, _, c in self.items_by_grade()[:6])
        more = " + ..." if len(self) > 6 else ""
        return f"FormalSeries({head or '0'}{more}; valid_to={self.valid_to})"

    def format(self) -> str:
        body = " + ".join(_fmt_term(self.lattice, k, c) for k, _, c in self.items_by_grade())
        return f"{body or '0'} + O(grade > {self.valid_to})"


def _fmt_term(lat, key, c):
    mono = []
    q = lat.q_exp(key)
    if q:
        mono.append(f"q^{q}")
    for i, t in enumerate(lat.t_exp(key)):
        if t:
            mono.append(f"t{i}^{t}")
    coeff = str(c.coords[0]) if c.is_rational() else repr(c)
    return f"{coeff}*{'*'.join(mono)}" if mono else coeff


def _lift(like: FormalSeries, other) -> FormalSeries:
    if isinstance(other, FormalSeries):
        return other
    return FormalSeries._raw(like.lattice, _nonzero({like.lattice.zero_key(): as_cyc(other)}), INF)


def _nonzero(terms: dict) -> dict:
    return {k: c for k, c in terms.items() if not c.is_zero()}


def _check_same(a: FormalSeries, b: FormalSeries):
    if a.lattice != b.lattice:
        raise UsageError("series live on different lattices")


def _truncated(lattice, terms, valid_to) -> FormalSeries:
    bound = lattice.bound(valid_to)
    if bound is None:
        return FormalSeries._raw(lattice, _nonzero(terms), valid_to)
    out = {k: c for k, c in terms.items() if not c.is_zero() and lattice.gint(k) <= bound}
    return FormalSeries._raw(lattice, out, valid_to)


# -- constructors --------------------------------------------------------------


def series_monomial(lattice: ExponentLattice, key, c=1, valid_to=INF) -> FormalSeries:
    """Single-term series ``c * x^key``."""
    return FormalSeries(lattice, {tuple(key): as_cyc(c)}, valid_to)


def series_one(lattice: ExponentLattice, valid_to=INF) -> FormalSeries:
    return _truncated(lattice, {lattice.zero_key(): ONE}, valid_to)


def series_zero(lattice: ExponentLattice, valid_to=INF) -> FormalSeries:
    return FormalSeries._raw(lattice, {}, valid_to)


def series_from_terms(lattice: ExponentLattice, terms: Iterable, valid_to=INF) -> FormalSeries:
    """Build from ``(q_exp, t_exps, coeff)`` triples with rational exponents."""
    acc: dict = {}
    for q, t, c in terms:
        k = lattice.key(q, t)
        acc[k] = acc.get(k, CycNumber.rational(0)) + as_cyc(c)
    return FormalSeries(lattice, acc, valid_to)


def series_truncate(a: FormalSeries, valid_to) -> FormalSeries:
    """Forget everything above ``valid_to`` (never raises precision)."""
    if valid_to == INF or (a.valid_to != INF and a.valid_to <= valid_to):
        return a
    return _truncated(a.lattice, a._terms, _frac(valid_to))


# -- ring operations -----------------------------------------------------------


def series_add(a: FormalSeries, b: FormalSeries) -> FormalSeries:
    _check_same(a, b)
    vt = min(a.valid_to, b.valid_to)
    out = dict(a._terms)
    for k, c in b._terms.items():
        prev = out.get(k)
        out[k] = c if prev is None else prev + c
    return _truncated(a.lattice, out, vt)


def series_sub(a: FormalSeries, b: FormalSeries) -> FormalSeries:
    return series_add(a, series_scale(b, -1))


def series_scale(a: FormalSeries, c) -> FormalSeries:
    c = as_cyc(c)
    return FormalSeries._raw(a.lattice, _nonzero({k: v * c for k, v in a._terms.items()}), a.valid_to)


def _mul_validity(a: FormalSeries, b: FormalSeries):
    return min(
        _bound_add(a.valid_to, b.min_grade),
        _bound_add(b.valid_to, a.min_grade),
        _bound_add(a.valid_to, b.valid_to),
    )


def series_mul(a: FormalSeries, b: FormalSeries) -> FormalSeries:
    """Product; exact up to min(a.valid_to + b.min_grade, b.valid_to + a.min_grade)."""
    _check_same(a, b)
    vt = _mul_validity(a, b)
    lat = a.lattice
    bound = lat.bound(vt)
    ia, ib = a.items_by_grade(), b.items_by_grade()
    if len(ia) > len(ib):
        ia, ib = ib, ia
    out: dict = {}
    get = out.get
    for ka, ga, ca in ia:
        for kb, gb, cb in ib:
            if bound is not None and ga + gb > bound:
                break
            k = _kadd(ka, kb)
            prev = get(k)
            out[k] = ca * cb if prev is None else prev + ca * cb
    return FormalSeries._raw(lat, _nonzero(out), vt)


# -- units and graded recursions -----------------------------------------------


def _unit_split(a: FormalSeries):
    """Write a = c * x^m * (1 + h) with every term of h of positive grade."""
    items = a.items_by_grade()
    if not items:
        raise DomainError("the zero series is not a unit")
    m, gm, c = items[0]
    if len(items) > 1 and items[1][1] == gm:
        raise DomainError(
            "leading term is not unique under the grading; choose a different chamber"
        )
    cinv = c.inverse()
    h = [(_ksub(k, m), g - gm, v * cinv) for k, g, v in items[1:]]
    h_valid = _bound_add(a.valid_to, -a.lattice.to_grade(gm)) if a.valid_to != INF else INF
    return m, gm, c, h, h_valid


def _support(lattice, steps, bound) -> list:
    """All sums of step keys with integer grade <= bound, sorted by grade."""
    zero = lattice.zero_key()
    seen = {zero: 0}
    frontier = [zero]
    while frontier:
        nxt = []
        for k in frontier:
            g0 = seen[k]
            for d, gd, _ in steps:
                g = g0 + gd
                if g > bound:
                    break
                kk = _kadd(k, d)
                if kk not in seen:
                    seen[kk] = g
                    nxt.append(kk)
        frontier = nxt
    out = sorted(seen.items(), key=lambda it: (it[1], it[0]))
    return out


def _resolve_bound(lattice, valid_to, cap, what):
    vt = valid_to if cap is None else min(valid_to, _frac(cap))
    if vt == INF:
        raise UsageError(f"{what} of an exact series is infinite; pass valid_to")
    return vt, lattice.bound(vt)


def _inverse_one_plus(lattice, h, bound) -> dict:
    b = {lattice.zero_key(): ONE}
    for f, gf in _support(lattice, h, bound)[1:]:
        s = None
        for d, gd, hd in h:
            if gd > gf:
                break
            prev = b.get(_ksub(f, d))
            if prev is not None:
                s = hd * prev if s is None else s + hd * prev
        if s is not None and not s.is_zero():
            b[f] = -s
    return b


def _power_one_plus(lattice, h, e: int, bound) -> dict:
    # J.C.P. Miller recurrence from (1+h) D(b) = e b D(1+h), D = grading derivation
    b = {lattice.zero_key(): ONE}
    for f, gf in _support(lattice, h, bound)[1:]:
        s = None
        for d, gd, hd in h:
            if gd > gf:
                break
            prev = b.get(_ksub(f, d))
            if prev is not None:
                w = (e + 1) * gd - gf
                if w:
                    term = hd * prev * w
                    s = term if s is None else s + term
        if s is not None and not s.is_zero():
            b[f] = s * Fraction(1, gf)
    return b


def series_inverse_unit(a: FormalSeries, valid_to=None) -> FormalSeries:
    """Multiplicative inverse of a unit c * x^m * (1 + h).

    ``valid_to`` caps the result, and is required when ``a`` is exact.
    """
    m, gm, c, h, h_valid = _unit_split(a)
    lat = a.lattice
    gmf = lat.to_grade(gm)
    # (1+h)^-1 is known to h_valid; shifting by x^-m lowers grades by gm
    natural = _bound_add(h_valid, -gmf) if h_valid != INF else INF
    vt, _ = _resolve_bound(lat, natural, valid_to, "inverse")
    inner_bound = lat.bound(vt + gmf)
    b = _inverse_one_plus(lat, h, inner_bound)
    cinv = c.inverse()
    neg_m = tuple(-x for x in m)
    out = {_kadd(k, neg_m): v * cinv for k, v in b.items()}
    return _truncated(lat, out, vt)


def series_int_pow(a: FormalSeries, e: int, valid_to=None) -> FormalSeries:
    """a**e.  Negative exponents require ``a`` to be a unit."""
    if not isinstance(e, int):
        raise UsageError("exponent must be an integer")
    lat = a.lattice
    if e == 0:
        return series_one(lat, INF if valid_to is None else _frac(valid_to))
    if e == 1:
        return a if valid_to is None else series_truncate(a, valid_to)
    if e > 0 and a.valid_to == INF:
        return _pow_by_squaring(a, e, valid_to)
    try:
        m, gm, c, h, h_valid = _unit_split(a)
    except DomainError:
        if e < 0:
            raise
        return _pow_by_squaring(a, e, valid_to)
    gmf = lat.to_grade(gm)
    natural = _bound_add(h_valid, e * gmf) if h_valid != INF else INF
    vt, _ = _resolve_bound(lat, natural, valid_to, "power")
    b = _power_one_plus(lat, h, e, lat.bound(vt - e * gmf))
    ce = c**e
    shift = tuple(e * x for x in m)
    out = {_kadd(k, shift): v * ce for k, v in b.items()}
    return _truncated(lat, out, vt)


def _pow_by_squaring(a: FormalSeries, e: int, valid_to) -> FormalSeries:
    result = None
    base = a
    while e:
        if e & 1:
            result = base if result is None else series_mul(result, base)
        e >>= 1
        if e:
            base = series_mul(base, base)
    if valid_to is not None:
        result = series_truncate(result, valid_to)
    return result


def series_exp(a: FormalSeries, valid_to=None) -> FormalSeries:
    """exp(a) for a series whose every term has positive grade."""
    lat = a.lattice
    items = a.items_by_grade()
    if items and items[0][1] <= 0:
        raise DomainError("exp needs every term of its argument to have positive grade")
    if not items:
        return series_one(lat, a.valid_to if valid_to is None else min(a.valid_to, _frac(valid_to)))
    vt, bound = _resolve_bound(lat, a.valid_to, valid_to, "exp")
    b = {lat.zero_key(): ONE}
    for f, gf in _support(lat, items, bound)[1:]:
        s = None
        for d, gd, ad in items:
            if gd > gf:
                break
            prev = b.get(_ksub(f, d))
            if prev is not None:
                term = ad * prev * gd
                s = term if s is None else s + term
        if s is not None and not s.is_zero():
            b[f] = s * Fraction(1, gf)
    return _truncated(lat, b, vt)


def series_log(a: FormalSeries, valid_to=None) -> FormalSeries:
    """log(1 + h) for h with every term of positive grade."""
    lat = a.lattice
    zero = lat.zero_key()
    if a.get(zero) != 1:
        raise DomainError("log needs a series of the form 1 + h")
    h = [(k, g, c) for k, g, c in a.items_by_grade() if k != zero]
    if h and h[0][1] <= 0:
        raise DomainError("log needs every non-constant term to have positive grade")
    if not h:
        return series_zero(lat, a.valid_to if valid_to is None else min(a.valid_to, _frac(valid_to)))
    vt, bound = _resolve_bound(lat, a.valid_to, valid_to, "log")
    hmap = {k: c for k, _, c in h}
    b: dict = {}
    for f, gf in _support(lat, h, bound)[1:]:
        s = hmap.get(f)
        s = s * gf if s is not None else None
        for d, gd, hd in h:
            if gd >= gf:
                break
            prev = b.get(_ksub(f, d))
            if prev is not None:
                term = -(hd * prev * (gf - gd))
                s = term if s is None else s + term
        if s is not None and not s.is_zero():
            b[f] = s * Fraction(1, gf)
    return _truncated(lat, b, vt)


# -- substitutions -------------------------------------------------------------


def _mat_inverse(mat: Sequence[Sequence]) -> list:
    n = len(mat)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise UsageError("t_map is not invertible")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def series_substitute_lattice(
    a: FormalSeries, q_shift=0, t_map: Sequence[Sequence[int]] | None = None, lattice: ExponentLattice | None = None
) -> FormalSeries:
    """Send q^x t^b to q^(x + q_shift) t^(t_map b), coefficients unchanged.

    The grading is transported along the map, so ``valid_to`` only moves by
    ``w_q * q_shift``.  Passing ``lattice`` asserts the expected target.
    """
    lat = a.lattice
    k = lat.rank
    q_shift = _frac(q_shift)
    qs = q_shift * lat.q_denominator
    if qs.denominator != 1:
        raise UsageError(f"q-shift {q_shift} not representable with q_denominator={lat.q_denominator}")
    qs = int(qs)
    if t_map is None:
        t_map = [[int(i == j) for j in range(k)] for i in range(k)]
    if len(t_map) != k or any(len(row) != k for row in t_map):
        raise UsageError(f"t_map must be a {k}x{k} integer matrix")
    if any(not isinstance(x, int) for row in t_map for x in row):
        raise UsageError("t_map entries must be integers")
    inv = _mat_inverse(t_map) if k else []
    # transported weights w' = w M^-1 so that w'(M b) = w(b)
    w_new = tuple(sum(lat.w_t[i] * inv[i][j] for i in range(k)) for j in range(k))
    target = lat.with_weights(w_t=w_new)
    if lattice is not None:
        if lattice != target:
            raise UsageError("target lattice grading is not the transport of the source grading")
        target = lattice
    out = {}
    for key, c in a._terms.items():
        t = key[1:]
        nt = tuple(sum(t_map[i][j] * t[j] for j in range(k)) for i in range(k))
        out[(key[0] + qs,) + nt] = c
    vt = _bound_add(a.valid_to, lat.w_q * q_shift) if a.valid_to != INF else INF
    return FormalSeries._raw(target, out, vt)


def series_elliptic_shift(a: FormalSeries, direction: int) -> FormalSeries:
    """Substitute t_d -> q t_d: the q-exponent grows by the t_d-exponent.

    The result is graded by the pulled-back functional (weight of t_d drops
    by w_q), which keeps the original ``valid_to`` sound.
    """
    lat = a.lattice
    if not 0 <= direction < lat.rank:
        raise UsageError(f"direction {direction} outside lattice rank {lat.rank}")
    ratio = Fraction(lat.q_denominator, lat.t_denominator)
    out = {}
    for key, c in a._terms.items():
        dq = key[1 + direction] * ratio
        if dq.denominator != 1:
            raise UsageError("shifted q-exponent not representable; raise q_denominator")
        out[(key[0] + int(dq),) + key[1:]] = c
    w_t = list(lat.w_t)
    w_t[direction] -= lat.w_q
    return FormalSeries._raw(lat.with_weights(w_t=w_t), out, a.valid_to)


def series_t_slice(a: FormalSeries, direction: int, t_exp) -> FormalSeries:
    """Coefficient series of t_d^t_exp, as a series in the remaining variables."""
    lat = a.lattice
    tn = _frac(t_exp) * lat.t_denominator
    if tn.denominator != 1:
        raise UsageError(f"t-exponent {t_exp} not representable")
    tn = int(tn)
    w_t = lat.w_t[:direction] + lat.w_t[direction + 1:]
    sub = ExponentLattice(lat.rank - 1, lat.t_denominator, lat.q_denominator, lat.w_q, w_t)
    out = {}
    for key, c in a._terms.items():
        if key[1 + direction] == tn:
            out[key[: 1 + direction] + key[2 + direction:]] = c
    shift = lat.w_t[direction] * _frac(t_exp)
    vt = a.valid_to - shift if a.valid_to != INF else INF
    return FormalSeries._raw(sub, out, vt)


# -- infinite products -----------------------------------------------------------


def series_product_stream(
    factors: Iterable, valid_to, lattice: ExponentLattice | None = None
) -> FormalSeries:
    """Product of factors (1 + h)^e truncated at ``valid_to``.

    Factors must arrive in non-decreasing order of the minimal grade of h;
    the stream is abandoned at the first factor whose h starts above
    ``valid_to``, so infinite generators are fine.
    """
    valid_to = _frac(valid_to)
    acc = None
    prev_delta = None
    for item in factors:
        f, e = item if isinstance(item, tuple) else (item, 1)
        if lattice is None:
            lattice = f.lattice
        zero = f.lattice.zero_key()
        h = [(k, g) for k, g, _ in f.items_by_grade() if k != zero]
        if f.get(zero) != 1:
            raise ChamberError("stream factors must have constant term 1")
        if h and h[0][1] <= 0:
            raise ChamberError(
                "factor has a non-positively graded term; the chamber does not admit this expansion"
            )
        if not h or e == 0:
            continue
        delta = f.lattice.to_grade(h[0][1])
        if prev_delta is not None and delta < prev_delta:
            raise UsageError("stream factors must come in non-decreasing order of grade")
        prev_delta = delta
        if delta > valid_to:
            break
        term = series_int_pow(f, e, valid_to=valid_to)
        acc = term if acc is None else series_truncate(series_mul(acc, term), valid_to)
    if acc is None:
        if lattice is None:
            raise UsageError("empty stream needs an explicit lattice")
        return series_one(lattice, valid_to)
    return acc


def series_at_order(build, target) -> FormalSeries:
    """Call ``build(order)`` until its result is exact to ``target``.

    Monomial prefactors of negative grade eat precision; the shortfall is
    affine in the requested order, so one retry normally suffices.
    """
    target = _frac(target)
    inner = target
    for _ in range(6):
        s = build(inner)
        if s.valid_to >= target:
            return series_truncate(s, target)
        inner += target - s.valid_to
    raise PrecisionError(f"could not reach order {target}")


# -- queries -------------------------------------------------------------------


def series_coefficient(a: FormalSeries, key) -> CycNumber:
    """Exact coefficient of x^key; PrecisionError beyond ``valid_to``."""
    key = tuple(key)
    bound = a.lattice.bound(a.valid_to)
    if bound is not None and a.lattice.gint(key) > bound:
        raise PrecisionError(
            f"coefficient at grade {a.lattice.grade(key)} requested but series is exact only to {a.valid_to}"
        )
    return a.get(key)


@dataclass
class SeriesComparison:
    agree: bool
    compared: int
    mismatch: tuple | None = None  # (key, left, right)

    def __bool__(self):
        return self.agree


def compare_series(a: FormalSeries, b: FormalSeries) -> SeriesComparison:
    """Compare on every key both series know exactly.

    The two series may carry different gradings over the same exponents,
    which is how elliptic-shifted series are checked.
    """
    if not a.lattice.same_exponents(b.lattice):
        raise UsageError("series have incompatible exponent lattices")
    la, lb = a.lattice, b.lattice
    ba, bb = la.bound(a.valid_to), lb.bound(b.valid_to)

    def inside(k):
        return (ba is None or la.gint(k) <= ba) and (bb is None or lb.gint(k) <= bb)

    keys = sorted((k for k in set(a._terms) | set(b._terms) if inside(k)), key=lambda k: (la.gint(k), k))
    for k in keys:
        x, y = a.get(k), b.get(k)
        if x != y:
            return SeriesComparison(False, len(keys), (k, x, y))
    return SeriesComparison(True, len(keys))
