"""Counting invariants of the flopping curve and parabolic pair series."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cyclotomic import ONE
from .errors import DomainError, UsageError
from .modular import fn_poly
from .series import (
    INF,
    ExponentLattice,
    FormalSeries,
    compare_series,
    series_exp,
    series_int_pow,
    series_mul,
    series_one,
    series_truncate,
)

__all__ = [
    "FlopCurveData",
    "n_invariant",
    "n_invariant_from_recursion",
    "bracket",
    "par_lattice",
    "par_series_behrend",
    "par_series_euler",
    "par_exp_side",
    "ParCheck",
    "check_par_equals_n",
]

MAX_LENGTH = 6


@dataclass(frozen=True)
class FlopCurveData:
    """Numerical data of a flopping curve C.

    ``n`` lists n_1..n_l; entries past l are zero.  ``width`` is only
    meaningful for l = 1, where it must equal n_1.
    """

    l: int
    n: tuple
    width: int | None = None
    h_dot_c: int = 1
    p_dot_c: int = 0

    def __post_init__(self):
        object.__setattr__(self, "n", tuple(int(x) for x in self.n))
        if not isinstance(self.l, int) or not 1 <= self.l <= MAX_LENGTH:
            raise DomainError(f"l must be in 1..{MAX_LENGTH}, got {self.l}")
        if len(self.n) != self.l:
            raise DomainError(f"expected {self.l} multiplicities n_j, got {len(self.n)}")
        if any(x < 0 for x in self.n):
            raise DomainError("multiplicities n_j must be non-negative")
        if self.h_dot_c < 1:
            raise DomainError("H.C must be a positive integer")
        if self.width is not None:
            if self.l != 1:
                raise UsageError("width is defined only for l = 1")
            if self.width != self.n[0]:
                raise DomainError(f"width {self.width} must equal n_1 = {self.n[0]}")

    def n_j(self, j: int) -> int:
        return self.n[j - 1] if 1 <= j <= self.l else 0

    def euler_width(self) -> int:
        if self.l != 1:
            raise UsageError("the Euler variant is only available for l = 1")
        return self.width if self.width is not None else self.n[0]


def n_invariant(n: int, m: int, data: FlopCurveData) -> Fraction:
    """N_{n, m[C]} as a divisor sum; every k divides n = 0."""
    if m < 1:
        raise DomainError("m must be a positive integer")
    total = Fraction(0)
    for k in range(1, m + 1):
        if m % k == 0 and n % k == 0:
            nj = data.n_j(m // k)
            if nj:
                total += Fraction(nj, k * k)
    return total


def n_invariant_from_recursion(n: int, m: int, data: FlopCurveData) -> Fraction:
    """N_{n,m} rebuilt from the degree-one counts N_{1, j[C]}.

    sum over k | (n, m) of N_{1, (m/k)[C]} / k^2, with the degree-one counts
    taken from :func:`n_invariant` itself.
    """
    if m < 1:
        raise DomainError("m must be a positive integer")
    return sum(
        (n_invariant(1, m // k, data) / (k * k) for k in range(1, m + 1) if m % k == 0 and n % k == 0),
        Fraction(0),
    )


def bracket(h_dot_beta: int) -> int:
    """<H, beta> = (-1)^(H.beta - 1) H.beta."""
    return (-1) ** ((h_dot_beta - 1) % 2) * h_dot_beta


def par_lattice(w_c=Fraction(1, 2)) -> ExponentLattice:
    """Lattice (q, t^C) with t^C positively graded."""
    w_c = Fraction(w_c)
    if w_c <= 0:
        raise DomainError("the C-weight must be positive for parabolic series")
    return ExponentLattice(1, 2, 24, Fraction(1), (w_c,))


def _slice_n(mu: Fraction, j: int, hc: int):
    n = mu * j * hc
    if n.denominator != 1:
        return None
    n = int(n)
    if mu == 0:
        return 0
    return n if n >= 1 else None


def par_series_behrend(data: FlopCurveData, mu, order, lattice: ExponentLattice | None = None) -> FormalSeries:
    lattice = lattice or par_lattice()
    mu, order = Fraction(mu), Fraction(order)
    hc = data.h_dot_c
    zero = lattice.zero_key()
    result = series_one(lattice)
    for j in range(1, data.l + 1):
        e = j * data.n_j(j) * hc
        n = _slice_n(mu, j, hc)
        if n is None or e == 0:
            continue
        sign = -1 if (j * hc) % 2 == 0 else 1
        f = FormalSeries(lattice, {zero: ONE, lattice.key(n, (j,)): sign * ONE}, INF)
        result = series_mul(result, series_int_pow(f, e))
    return series_truncate(result, order)


def par_series_euler(width: int, mu, order, lattice: ExponentLattice | None = None) -> FormalSeries:
    lattice = lattice or par_lattice()
    mu, order = Fraction(mu), Fraction(order)
    if width < 1:
        raise DomainError("width must be a positive integer")
    if mu.denominator != 1 or mu < 0:
        return series_one(lattice, order)
    return series_truncate(fn_poly(width, lattice.key(mu, (1,)), lattice), order)


def par_exp_side(data: FlopCurveData, mu, order, lattice: ExponentLattice | None = None) -> FormalSeries:
    """prod over the slice of exp(N_{n,beta} q^n t^beta)^<H,beta>."""
    lattice = lattice or par_lattice()
    mu, order = Fraction(mu), Fraction(order)
    hc = data.h_dot_c
    terms = {}
    m = 1
    while True:
        if lattice.w_q * mu * m * hc + lattice.w_t[0] * m > order:
            break
        n = _slice_n(mu, m, hc)
        if n is not None:
            c = n_invariant(n, m, data) * bracket(m * hc)
            if c:
                terms[lattice.key(n, (m,))] = c
        m += 1
    return series_exp(FormalSeries(lattice, terms, order), valid_to=order)


@dataclass
class ParCheck:
    mu: Fraction
    agree: bool
    compared: int
    mismatch: tuple | None = None

    def __bool__(self):
        return self.agree


def check_par_equals_n(data: FlopCurveData, mu, order, lattice: ExponentLattice | None = None) -> ParCheck:
    """Compare the parabolic product with the exponential of N-invariants."""
    left = par_series_behrend(data, mu, order, lattice)
    right = par_exp_side(data, mu, order, lattice)
    cmp = compare_series(left, right)
    return ParCheck(Fraction(mu), cmp.agree, cmp.compared, cmp.mismatch)
