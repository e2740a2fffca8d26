"""Acceptance criteria: exact identities at desk-scale truncation.

Each test runs one identity suite, enforces its wall-clock budget and
records a PASS/FAIL line shown in the pytest terminal summary.
"""

import time

import pytest

from flopdt import checks

from conftest import ACCEPTANCE_LINES

CRITERIA = [
    (1, "Jacobi triple product, twists -1/0/1, order 6", 5, lambda: checks.suite_triple_product(6, (-1, 0, 1))),
    (2, "Par = exp(N), l<=3, n_j<=2, H.C<=2, slopes den<=3, order 6", 30, lambda: checks.suite_par_equals_n(6, (1, 2), 3)),
    (3, "multiple cover recursion, m and |n| <= 12", 1, lambda: checks.suite_multiple_cover(12)),
    (4, "Behrend term rational with elliptic index, |P.C|<=3, order 4", 60, lambda: checks.suite_behrend(4, range(-3, 4))),
    (5, "Euler term equals cyclotomic theta form, width<=4, |P.C|<=2", 30, lambda: checks.suite_euler_cyclotomic(4, range(1, 5), range(-2, 3))),
    (6, "width one Euler and Behrend terms", 5, lambda: checks.suite_width_one(4)),
    (7, "flop followed by reversed flop is the identity, 10 fixtures", 30, lambda: checks.suite_involution(4, 0, 10)),
    (8, "rank two blow-up column against theta_a, a in {0,1}, order 6", 5, lambda: checks.suite_rank2(6)),
    (9, "N-factorised multiplier equals Behrend term, l=1", 10, lambda: checks.suite_factorization(4, 1)),
    (10, "series core properties, 100 fixtures", 30, lambda: checks.suite_series_core(0, 100)),
]


@pytest.mark.parametrize("number,title,limit,run", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, limit, run):
    t0 = time.perf_counter()
    try:
        result = run()
        elapsed = time.perf_counter() - t0
        ok = result.passed and elapsed < limit
        detail = result.failure or (f"over budget {elapsed:.2f}s >= {limit}s" if not ok else f"{result.cases} cases")
    except Exception as exc:
        elapsed = time.perf_counter() - t0
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    line = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail} ({elapsed:.2f}s, limit {limit}s)"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line
