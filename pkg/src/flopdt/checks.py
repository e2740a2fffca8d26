"""The identity suite behind ``flopdt check`` and the acceptance tests.

Each suite returns a :class:`SuiteResult`; a failing suite carries the
first disagreeing case and coefficient.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .blowup import rank2_theta_quotient_check
from .cyclotomic import root_of_unity
from .curves import FlopCurveData, check_par_equals_n, n_invariant, n_invariant_from_recursion
from .flop import (
    DTSeries,
    GeometryConfig,
    elliptic_index_check,
    error_term_behrend,
    error_term_cyclotomic_euler,
    error_term_euler,
    flop_transform,
    n_factorized_multiplier,
)
from .modular import ThetaArgument, apply_twist, default_lattice, theta_product, theta_sum
from .series import (
    ExponentLattice,
    FormalSeries,
    compare_series,
    series_add,
    series_exp,
    series_inverse_unit,
    series_log,
    series_mul,
    series_one,
    series_scale,
    series_truncate,
)

__all__ = ["SUITE_VERSION", "SuiteResult", "SUITES", "run_suite", "run_all", "curve_data_range", "random_series"]

SUITE_VERSION = "1"


@dataclass
class SuiteResult:
    name: str
    label: str
    passed: bool
    cases: int
    elapsed: float = 0.0
    failure: str | None = None
    notes: dict = field(default_factory=dict)


def curve_data_range(max_l: int = 3, values=(1, 2)):
    for l in range(1, max_l + 1):
        for ns in itertools.product(values, repeat=l):
            yield l, ns


def _fail(name, label, cases, msg, **notes):
    return SuiteResult(name, label, False, cases, failure=msg, notes=notes)


def suite_triple_product(order=6, twists=(-1, 0, 1)):
    lat = default_lattice()
    cases = 0
    for c in twists:
        arg = ThetaArgument(twist=c)
        cmp = compare_series(theta_sum(1, 1, arg, order, lat), theta_product(arg, order, lat))
        cases += 1
        if not cmp.agree or cmp.compared == 0:
            return _fail("triple_product", "Jacobi triple product", cases, f"twist {c}: {cmp.mismatch}")
    return SuiteResult("triple_product", "Jacobi triple product", True, cases)


def slope_slices(order, max_den=3):
    return sorted({Fraction(p, d) for d in range(1, max_den + 1) for p in range(0, int(order * d) + 1)})


def suite_par_equals_n(order=6, hc_values=(1, 2), max_den=3):
    cases = 0
    for l, ns in curve_data_range():
        for hc in hc_values:
            data = FlopCurveData(l, ns, h_dot_c=hc)
            for mu in slope_slices(order, max_den):
                r = check_par_equals_n(data, mu, order)
                cases += 1
                if not r:
                    return _fail("par_equals_n", "Par = exp(N)", cases, f"{data} mu={mu}: {r.mismatch}")
    return SuiteResult("par_equals_n", "Par = exp(N)", True, cases)


def suite_multiple_cover(bound=12):
    cases = 0
    for l, ns in curve_data_range(values=(0, 1, 2)):
        data = FlopCurveData(l, ns)
        for j in range(1, l + 1):
            if n_invariant(1, j, data) != data.n_j(j):
                return _fail("multiple_cover", "multiple cover formula", cases, f"{data}: N_1,{j} != n_{j}")
        for m in range(1, bound + 1):
            for n in range(-bound, bound + 1):
                cases += 1
                direct = n_invariant(n, m, data)
                if direct != n_invariant_from_recursion(n, m, data) or direct != n_invariant(-n, m, data):
                    return _fail("multiple_cover", "multiple cover formula", cases, f"{data}: N_{n},{m}")
    return SuiteResult("multiple_cover", "multiple cover formula", True, cases)


def suite_behrend(order=4, pc_range=range(-3, 4)):
    cases = 0
    for l, ns in curve_data_range():
        for pc in pc_range:
            cfg = GeometryConfig(FlopCurveData(l, ns, p_dot_c=pc), order=order)
            cases += 1
            err = error_term_behrend(cfg)
            if not err.is_rational():
                return _fail("behrend", "Behrend error term", cases, f"l={l} n={ns} P.C={pc}: irrational coefficient")
            el = elliptic_index_check(cfg)
            if not el:
                return _fail("behrend", "Behrend error term", cases, f"l={l} n={ns} P.C={pc}: elliptic law {el.mismatch}")
    return SuiteResult("behrend", "Behrend error term", True, cases)


def suite_euler_cyclotomic(order=4, widths=range(1, 5), pc_range=range(-2, 3)):
    cases = 0
    for n in widths:
        for pc in pc_range:
            cfg = GeometryConfig(FlopCurveData(1, (n,), width=n, p_dot_c=pc), order=order)
            cases += 1
            cmp = compare_series(error_term_euler(cfg), error_term_cyclotomic_euler(cfg))
            if not cmp.agree:
                return _fail("euler_cyclotomic", "Euler error term", cases, f"width {n} P.C={pc}: {cmp.mismatch}")
    return SuiteResult("euler_cyclotomic", "Euler error term", True, cases)


def suite_width_one(order=4, pc_range=range(-3, 4)):
    """Width one: Euler and Behrend terms agree for odd P.C.

    For even P.C the Behrend argument loses its sign, and the two terms are
    related by t -> -t together with the sign (-1)^(P.C/2).
    """
    cases = 0
    for pc in pc_range:
        if pc == 0:
            continue
        cfg = GeometryConfig(FlopCurveData(1, (1,), width=1, p_dot_c=pc), order=order)
        cases += 1
        behrend = error_term_behrend(cfg)
        if pc % 2 == 0:
            behrend = series_scale(apply_twist(behrend, cfg.c_index, 1), -1 if (pc // 2) % 2 else 1)
        cmp = compare_series(error_term_euler(cfg), behrend)
        if not cmp.agree or cmp.compared == 0:
            return _fail("width_one", "width one", cases, f"P.C={pc}: {cmp.mismatch}")
    return SuiteResult("width_one", "width one", True, cases)


def random_dt(rng: random.Random, lattice: ExponentLattice, order, terms=6) -> FormalSeries:
    out = {}
    while len(out) < terms:
        key = lattice.key(Fraction(rng.randint(0, 4 * int(order)), 4), (Fraction(rng.randint(-6, 6), 2),))
        if lattice.grade(key) <= order:
            out[key] = Fraction(rng.choice([-1, 1]) * rng.randint(1, 5), rng.randint(1, 3))
    return FormalSeries(lattice, out, order)


def suite_involution(order=4, seed=0, fixtures=10):
    rng = random.Random(seed)
    for i in range(fixtures):
        l = rng.randint(1, 3)
        ns = tuple(rng.randint(1, 2) for _ in range(l))
        pc = rng.choice([-2, -1, 1, 2])
        cfg = GeometryConfig(FlopCurveData(l, ns, p_dot_c=pc), order=order)
        dt = DTSeries(random_dt(rng, cfg.source_lattice, order), f"P{i}")
        back = flop_transform(flop_transform(dt, cfg), cfg.reversed())
        cmp = compare_series(back.series, dt.series)
        if not cmp.agree or cmp.compared == 0:
            return _fail("involution", "flop involution", i + 1, f"fixture {i} (l={l} n={ns} P.C={pc}): {cmp.mismatch}")
    return SuiteResult("involution", "flop involution", True, fixtures)


def suite_rank2(order=6):
    reports = rank2_theta_quotient_check(order)
    for r in reports:
        if not r:
            return _fail("rank2", "rank two blow-up", len(reports), f"a={r.a}: {r.mismatch}")
    return SuiteResult("rank2", "rank two blow-up", True, len(reports))


def suite_factorization(order=4, max_l=1, pc_range=range(-3, 4)):
    cases = 0
    for l, ns in curve_data_range(max_l):
        for pc in pc_range:
            cfg = GeometryConfig(FlopCurveData(l, ns, p_dot_c=pc), order=order)
            cases += 1
            cmp = compare_series(n_factorized_multiplier(cfg), error_term_behrend(cfg))
            if not cmp.agree:
                return _fail("factorization", "N-factorization of the error term", cases, f"l={l} n={ns} P.C={pc}: {cmp.mismatch}")
    return SuiteResult("factorization", "N-factorization of the error term", True, cases)


# -- series-core properties ---------------------------------------------------

_WEIGHTS = (Fraction(-1, 2), Fraction(-1, 3), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2))


def random_lattice(rng: random.Random) -> ExponentLattice:
    return ExponentLattice(1, 2, 24, Fraction(1), (rng.choice(_WEIGHTS),))


def random_series(rng: random.Random, lattice: ExponentLattice, order, terms=5, positive=False, rational=True) -> FormalSeries:
    """Random series; ``positive`` keeps every term strictly positively graded."""
    out = {}
    attempts = 0
    while len(out) < terms and attempts < 200:
        attempts += 1
        key = lattice.key(Fraction(rng.randint(0, 12), 4), (Fraction(rng.randint(-4, 4), 2),))
        g = lattice.grade(key)
        if g > order or (positive and g <= 0) or g < -1:
            continue
        c = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        if c == 0:
            continue
        out[key] = c if rational else root_of_unity(rng.choice([3, 4, 8]), rng.randint(0, 7)) * c
    return FormalSeries(lattice, out, order)


def suite_series_core(seed=0, fixtures=100, order=3):
    rng = random.Random(seed)
    for i in range(fixtures):
        lat = random_lattice(rng)
        rational = i % 4 != 0
        a, b, c = (random_series(rng, lat, order, rational=rational) for _ in range(3))
        checks = {
            "assoc": (series_mul(series_mul(a, b), c), series_mul(a, series_mul(b, c))),
            "add-assoc": (series_add(series_add(a, b), c), series_add(a, series_add(b, c))),
            "distrib": (series_mul(a, series_add(b, c)), series_add(series_mul(a, b), series_mul(a, c))),
            "commut": (series_mul(a, b), series_mul(b, a)),
        }
        h = random_series(rng, lat, order, positive=True, rational=rational)
        checks["log-exp"] = (series_log(series_exp(h)), h)
        unit = series_add(series_one(lat, order), h)
        checks["exp-log"] = (series_exp(series_log(unit)), unit)
        checks["inverse"] = (series_mul(unit, series_inverse_unit(unit)), series_one(lat, order))
        # recomputing from more precise inputs must not move exact coefficients
        lo = order - 1
        checks["soundness"] = (
            series_mul(series_truncate(a, lo), series_truncate(b, lo)),
            series_mul(a, b),
        )
        for name, (x, y) in checks.items():
            cmp = compare_series(x, y)
            if not cmp.agree:
                return _fail("series_core", "series-core properties", i + 1, f"fixture {i} {name}: {cmp.mismatch}")
    return SuiteResult("series_core", "series-core properties", True, fixtures)


SUITES = {
    "triple_product": lambda order, seed: suite_triple_product(max(order, 6)),
    "par_equals_n": lambda order, seed: suite_par_equals_n(max(order, 6)),
    "multiple_cover": lambda order, seed: suite_multiple_cover(),
    "behrend": lambda order, seed: suite_behrend(order),
    "euler_cyclotomic": lambda order, seed: suite_euler_cyclotomic(order),
    "width_one": lambda order, seed: suite_width_one(order),
    "involution": lambda order, seed: suite_involution(order, seed),
    "rank2": lambda order, seed: suite_rank2(max(order, 6)),
    "factorization": lambda order, seed: suite_factorization(order),
    "series_core": lambda order, seed: suite_series_core(seed),
}


def run_suite(name: str, order=Fraction(4), seed: int = 0) -> SuiteResult:
    t0 = time.perf_counter()
    result = SUITES[name](Fraction(order), seed)
    result.elapsed = time.perf_counter() - t0
    return result


def run_all(order=Fraction(4), seed: int = 0, names=None) -> list:
    return [run_suite(n, order, seed) for n in (names or SUITES)]
