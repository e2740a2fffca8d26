import cmath
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from flopdt.cyclotomic import (
    CycNumber,
    cyc_make,
    cyclotomic_poly,
    euler_phi,
    exp_i_pi,
    root_of_unity,
)


def approx(z, w):
    return abs(complex(z) - w) < 1e-9


@pytest.mark.parametrize("n", range(1, 25))
def test_cyclotomic_poly_matches_primitive_roots(n):
    # product over primitive n-th roots, evaluated at x = 2
    value = 1
    for k in range(1, n + 1):
        if Fraction(k, n).denominator == n:
            value *= 2 - cmath.exp(2j * cmath.pi * k / n)
    coeffs = cyclotomic_poly(n)
    assert len(coeffs) == euler_phi(n) + 1
    assert abs(sum(c * 2**i for i, c in enumerate(coeffs)) - value) < 1e-6


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 8, 12, 15])
def test_roots_of_unity(n):
    z = root_of_unity(n)
    assert z**n == 1
    assert approx(z, cmath.exp(2j * cmath.pi / n))
    assert sum((root_of_unity(n, k) for k in range(n)), CycNumber.rational(0)) == (1 if n == 1 else 0)


def test_exp_i_pi_branch():
    assert exp_i_pi(1) == -1
    assert exp_i_pi(Fraction(1, 2)) == root_of_unity(4)
    assert approx(exp_i_pi(Fraction(-1, 3)), cmath.exp(-1j * cmath.pi / 3))


coords = st.lists(st.fractions(max_denominator=5).filter(lambda x: abs(x) < 10), min_size=1, max_size=6)


@given(coords, coords, st.sampled_from([3, 4, 5, 8, 12]))
def test_field_ops_match_complex(a, b, n):
    x = cyc_make(n, a[: euler_phi(n)])
    y = cyc_make(n, b[: euler_phi(n)])
    assert approx(x + y, complex(x) + complex(y))
    assert approx(x * y, complex(x) * complex(y))
    assert (x - y) + y == x
    if not y.is_zero():
        assert (x / y) * y == x


def test_mixed_orders_embed():
    z3, z4 = root_of_unity(3), root_of_unity(4)
    assert approx(z3 * z4, cmath.exp(2j * cmath.pi * (1 / 3 + 1 / 4)))
    assert (z3 * z4) ** 12 == 1


def test_rational_round_trip():
    x = CycNumber.rational(Fraction(-7, 3))
    assert x.is_rational() and x.to_fraction() == Fraction(-7, 3)
    assert not root_of_unity(4).is_rational()
