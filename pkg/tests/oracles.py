"""Independent reference computations used across the tests.

Everything here works on plain dicts {(q, t): Fraction} with rational
exponents and never touches the package internals.
"""

from fractions import Fraction
from itertools import product


def poly_mul(a, b, keep=lambda k: True):
    out = {}
    for (ka, va), (kb, vb) in product(a.items(), b.items()):
        k = tuple(x + y for x, y in zip(ka, kb))
        if keep(k):
            out[k] = out.get(k, 0) + va * vb
    return {k: v for k, v in out.items() if v}


def pentagonal_eta(order):
    """q^(1/24) sum_k (-1)^k q^(k(3k-1)/2), exponents up to ``order``."""
    out = {}
    for k in range(-40, 41):
        e = Fraction(1, 24) + Fraction(k * (3 * k - 1), 2)
        if e <= order:
            out[e] = out.get(e, 0) + (-1) ** (k % 2)
    return out


def mercator_log(h, order, grade):
    """log(1 + h) = sum (-1)^(k+1) h^k / k, terms of grade <= order."""
    keep = lambda k: grade(k) <= order
    total, power = {}, {(0, 0): Fraction(1)}
    for k in range(1, 64):
        power = poly_mul(power, h, keep)
        if not power:
            break
        for key, v in power.items():
            total[key] = total.get(key, 0) + Fraction((-1) ** (k + 1), k) * v
    return {k: v for k, v in total.items() if v}


def divisor_sum_n(n, m, ns):
    """N_{n,m} = sum over k | gcd(n, m) of n_{m/k} / k^2."""
    total = Fraction(0)
    for k in range(1, m + 1):
        if m % k == 0 and n % k == 0 and m // k <= len(ns):
            total += Fraction(ns[m // k - 1], k * k)
    return total


def theta_pairs(a, b, twist, q_limit):
    """Brute-force theta_{a,b}: {(q_exp, t_exp): complex} with q_exp <= q_limit."""
    import cmath

    out = {}
    for k in range(-60, 61):
        y = k + Fraction(a, 2)
        q = y * y / 2
        if q <= q_limit:
            out[(q, y)] = cmath.exp(1j * cmath.pi * float((b + twist) * y))
    return out
