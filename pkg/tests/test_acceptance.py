"""One check per acceptance criterion; prints a PASS/FAIL line for each.

Tolerances are pinned in ``fermi_ee.acceptance`` and asserted here.
"""

import math

import pytest

from fermi_ee import acceptance as A


def test_pinned_tolerances():
    assert A.ORACLE_RTOL == 1e-2
    assert A.PRESSURE_RTOL == 1e-7
    assert A.SOMMERFELD_SLOPE == 0.740480 and A.SOMMERFELD_RTOL == 5e-3
    assert A.LOG_LAW_RTOL == 3e-2
    assert A.PI2_OVER_3_ATOL == 1e-8
    assert A.EXPONENT_ATOL == 0.05
    assert A.ROUND_TRIP_RTOL == 1e-10
    assert A.MU_CORRECTION_RTOL == 2e-2
    assert A.NEGATIVITY_TOL == 1e-8
    assert A.ORACLE_ALPHAS == (0.5, 1.0, 2.0) and A.ORACLE_TEMPERATURES == (0.05, 0.1, 0.5)
    assert min(A.LOG_LAW_TEMPERATURES) == 3e-4 and max(A.LOG_LAW_TEMPERATURES) == 1e-2
    assert A.HIGH_T == (1e2, 1e3, 1e4)
    assert math.isclose(A.SOMMERFELD_SLOPE, math.pi / (3 * math.sqrt(2)), rel_tol=1e-6)


@pytest.fixture(scope="module")
def results():
    ctx = A.Context()
    out = {}
    for check in A.CRITERIA:
        res = check(ctx)
        print(res.line(), flush=True)
        out[res.criterion] = res
    return out


@pytest.mark.parametrize("criterion", range(1, 11))
def test_criterion(results, criterion, capsys):
    res = results[criterion]
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.line()
