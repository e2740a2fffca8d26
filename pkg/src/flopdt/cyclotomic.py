"""Exact arithmetic in cyclotomic fields Q(zeta_M).

Elements are stored in the power basis 1, z, ..., z^(phi(M)-1) of
Q[z]/(Phi_M).  Values whose non-constant coordinates vanish are kept in
order 1, so rational arithmetic never pays for the field structure.
"""

from __future__ import annotations

import cmath
import os
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .errors import CapacityError, DomainError

DEFAULT_CAP = 360

__all__ = [
    "CycNumber",
    "cyc_make",
    "cyc_add",
    "cyc_mul",
    "cyc_neg",
    "cyc_inv",
    "root_of_unity",
    "exp_i_pi",
    "euler_phi",
    "cyclotomic_poly",
    "cyc_cap",
]


def cyc_cap() -> int:
    """Largest admissible root-of-unity order (env ``FLOPDT_CYC_CAP``)."""
    raw = os.environ.get("FLOPDT_CYC_CAP")
    if raw is None:
        return DEFAULT_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise CapacityError(f"FLOPDT_CYC_CAP must be an integer, got {raw!r}")
    if cap < 1:
        raise CapacityError("FLOPDT_CYC_CAP must be positive")
    return cap


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # integer polynomials, low degree first, den monic
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + len(den) - 1]
        out[k] = c
        if c:
            for i, d in enumerate(den):
                num[k + i] -= c * d
    if any(num[: len(den) - 1]):
        raise ArithmeticError("inexact cyclotomic division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, constant term first."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divexact(poly, list(cyclotomic_poly(d)))
    return tuple(poly)


class _Field:
    __slots__ = ("order", "phi", "poly", "powers")

    def __init__(self, order: int):
        self.order = order
        self.phi = euler_phi(order)
        self.poly = cyclotomic_poly(order)
        # powers[k] = coordinates of z^k, 0 <= k < order
        phi = self.phi
        powers = []
        vec = [0] * phi
        vec[0] = 1
        for _ in range(order):
            powers.append(tuple(vec))
            top = vec[-1]
            vec = [0] + vec[:-1]
            if top:
                for i in range(phi):
                    vec[i] -= top * self.poly[i]
        self.powers = powers

    def reduce(self, coeffs: list) -> list:
        phi, poly = self.phi, self.poly
        coeffs = list(coeffs)
        for k in range(len(coeffs) - 1, phi - 1, -1):
            c = coeffs[k]
            if c:
                base = k - phi
                for i in range(phi):
                    if poly[i]:
                        coeffs[base + i] -= c * poly[i]
        coeffs = coeffs[:phi]
        coeffs += [0] * (phi - len(coeffs))
        return coeffs


_FIELDS: dict[int, _Field] = {}


def _field(order: int) -> _Field:
    f = _FIELDS.get(order)
    if f is None:
        if order < 1:
            raise DomainError(f"root-of-unity order must be positive, got {order}")
        cap = cyc_cap()
        if order > cap:
            raise CapacityError(f"cyclotomic order {order} exceeds cap {cap}")
        f = _FIELDS[order] = _Field(order)
    return f


@lru_cache(maxsize=None)
def _embedding(src: int, dst: int) -> tuple[tuple[int, ...], ...]:
    step = dst // src
    f = _field(dst)
    return tuple(f.powers[(i * step) % dst] for i in range(euler_phi(src)))


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floating-point values are not admissible coefficients")
    return Fraction(x)


class CycNumber:
    """An element of Q(zeta_order), immutable."""

    __slots__ = ("order", "coords")

    def __init__(self, order: int, coords):
        # trusted constructor: coords already reduced, length phi(order)
        self.order = order
        self.coords = coords

    @classmethod
    def rational(cls, value) -> "CycNumber":
        return cls(1, (_as_fraction(value),))

    @classmethod
    def _normalized(cls, order: int, coords) -> "CycNumber":
        if order > 1 and not any(coords[1:]):
            return cls(1, (coords[0],))
        return cls(order, tuple(coords))

    # -- queries ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_rational(self) -> bool:
        return self.order == 1 or not any(self.coords[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise DomainError(f"{self!r} is not rational")
        return self.coords[0]

    def embed(self, order: int) -> tuple:
        """Coordinates of this value inside Q(zeta_order)."""
        if order == self.order:
            return self.coords
        if order % self.order:
            raise DomainError(f"Q(zeta_{self.order}) does not embed in Q(zeta_{order})")
        phi = euler_phi(order)
        if self.order == 1:
            return (self.coords[0],) + (Fraction(0),) * (phi - 1)
        out = [Fraction(0)] * phi
        for c, img in zip(self.coords, _embedding(self.order, order)):
            if c:
                for i, v in enumerate(img):
                    if v:
                        out[i] += c * v
        return tuple(out)

    def __complex__(self) -> complex:
        z = cmath.exp(2j * cmath.pi / self.order)
        return complex(sum(float(c) * z**k for k, c in enumerate(self.coords)))

    # -- arithmetic ------------------------------------------------------
    @staticmethod
    def _coerce(other):
        if isinstance(other, CycNumber):
            return other
        if isinstance(other, (int, Fraction)):
            return CycNumber(1, (Fraction(other),))
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.order == 1 and other.order == 1:
            return CycNumber(1, (self.coords[0] + other.coords[0],))
        m = _lcm(self.order, other.order)
        _field(m)
        a, b = self.embed(m), other.embed(m)
        return CycNumber._normalized(m, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return CycNumber(self.order, tuple(-c for c in self.coords))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if self.order == 1:
                return CycNumber(1, (self.coords[0] * other,))
            return CycNumber._normalized(self.order, [c * other for c in self.coords])
        if not isinstance(other, CycNumber):
            return NotImplemented
        if self.order == 1:
            if other.order == 1:
                return CycNumber(1, (self.coords[0] * other.coords[0],))
            return other * self.coords[0]
        if other.order == 1:
            return self * other.coords[0]
        m = _lcm(self.order, other.order)
        f = _field(m)
        a, b = self.embed(m), other.embed(m)
        prod = [Fraction(0)] * (2 * f.phi - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return CycNumber._normalized(m, f.reduce(prod))

    __rmul__ = __mul__

    def inverse(self) -> "CycNumber":
        if self.is_zero():
            raise DomainError("inverse of zero")
        if self.order == 1:
            return CycNumber(1, (1 / self.coords[0],))
        f = _field(self.order)
        inv = _poly_inverse_mod(list(self.coords), [Fraction(c) for c in f.poly])
        inv += [Fraction(0)] * (f.phi - len(inv))
        return CycNumber._normalized(self.order, inv[: f.phi])

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DomainError("division by zero")
            return self * (1 / Fraction(other))
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        result = CycNumber(1, (Fraction(1),))
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- comparison ------------------------------------------------------
    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.order == other.order:
            return self.coords == other.coords
        m = _lcm(self.order, other.order)
        return self.embed(m) == other.embed(m)

    __hash__ = None

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        if self.order == 1:
            return f"CycNumber({self.coords[0]})"
        terms = [f"{c}*z^{k}" for k, c in enumerate(self.coords) if c]
        return f"CycNumber(M={self.order}: {' + '.join(terms) or '0'})"

    def coord_strings(self, order: int | None = None) -> list[str]:
        return [str(c) for c in self.embed(order or self.order)]


def _strip(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a: list, b: list) -> tuple[list, list]:
    a = _strip(list(a))
    b = _strip(list(b))
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while len(a) >= len(b) and a:
        c = a[-1] / lead
        k = len(a) - len(b)
        q[k] = c
        for i, v in enumerate(b):
            a[k + i] -= c * v
        _strip(a)
    return q, a


def _poly_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_sub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    for i, v in enumerate(b):
        a[i] -= v
    return _strip(a)


def _poly_inverse_mod(a: list, m: list) -> list:
    """u with a*u = 1 mod m via the extended Euclidean algorithm over Q."""
    r0, r1 = _strip(list(m)), _strip([Fraction(x) for x in a])
    s0, s1 = [], [Fraction(1)]
    while len(r1) > 1:
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
    if not r1:
        raise DomainError("element is not invertible")
    c = r1[0]
    return [x / c for x in s1]


def cyc_make(order: int, coords) -> CycNumber:
    """Canonical element of Q(zeta_order) from power-basis coordinates."""
    f = _field(order)
    coords = [_as_fraction(c) for c in coords]
    if len(coords) > f.phi:
        raise DomainError(
            f"{len(coords)} coordinates given but Q(zeta_{order}) has degree {f.phi}"
        )
    coords += [Fraction(0)] * (f.phi - len(coords))
    return CycNumber._normalized(order, coords)


def cyc_add(a: CycNumber, b: CycNumber) -> CycNumber:
    return a + b


def cyc_mul(a: CycNumber, b: CycNumber) -> CycNumber:
    return a * b


def cyc_neg(a: CycNumber) -> CycNumber:
    return -a


def cyc_inv(a: CycNumber) -> CycNumber:
    return a.inverse()


def root_of_unity(order: int, k: int = 1) -> CycNumber:
    """zeta_order ** k."""
    f = _field(order)
    return CycNumber._normalized(order, [Fraction(c) for c in f.powers[k % order]])


def exp_i_pi(r) -> CycNumber:
    """e^(i*pi*r) for rational r, i.e. (-1)^r on the principal branch."""
    r = _as_fraction(r)
    return root_of_unity(2 * r.denominator, r.numerator)


ONE = CycNumber(1, (Fraction(1),))
ZERO = CycNumber(1, (Fraction(0),))
