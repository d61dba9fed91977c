import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fermi_ee.analysis import SampleSeries, fit_log_law, fit_power_law, fit_two_term
from fermi_ee.errors import IllConditionedFitError


def test_power_law_examples():
    x = (1, 2, 4, 8)
    k, c, _ = fit_power_law(SampleSeries(x, [3 * v**2 for v in x]))
    assert k == pytest.approx(2.0, abs=1e-12) and c == pytest.approx(3.0, rel=1e-12)
    x = tuple(np.geomspace(1, 1e4, 9))
    k, _, _ = fit_power_law(SampleSeries(x, [v**0.5 * (1 + 0.01 / v) for v in x]))
    assert k == pytest.approx(0.5, abs=0.01)
    with pytest.raises(ValueError):
        fit_power_law(SampleSeries((1, 2, 3), (1.0, -1.0, 2.0)))


def test_log_law_examples():
    x = (0.01, 0.1, 1.0, 10.0)
    a, b, _ = fit_log_law(SampleSeries(x, [2 * math.log(1 / v) + 5 for v in x]), 1.0)
    assert (a, b) == pytest.approx((2.0, 5.0))
    a, b, _ = fit_log_law(SampleSeries(x, [4.0] * 4), 1.0)
    assert a == pytest.approx(0.0, abs=1e-12) and b == pytest.approx(4.0)


def test_two_term_examples():
    L = (10, 20, 40, 80)
    fit = fit_two_term(SampleSeries(L, [4 * v + 7 for v in L]), 1)
    assert fit.coefficients == pytest.approx((4.0, 7.0))
    assert fit.residual_norm < 1e-10
    with pytest.raises(ValueError):
        fit_two_term(SampleSeries((1, 2, 3), (1, 2, 3)), 1)


def test_two_term_d3_and_conditioning():
    L = (5.0, 10.0, 20.0, 40.0, 80.0)
    y = [2 * v**3 - 3 * v**2 + 1.5 for v in L]
    fit = fit_two_term(SampleSeries(L, y), 3)
    assert fit.coefficients == pytest.approx((2.0, -3.0, 1.5), rel=1e-8)
    with pytest.raises(IllConditionedFitError):
        fit_two_term(SampleSeries((1e6, 1e6 + 1e-3, 1e6 + 2e-3, 1e6 + 3e-3), (1, 2, 3, 4)), 3)


def test_sample_series_validation():
    with pytest.raises(ValueError):
        SampleSeries((1, 1, 2), (0, 0, 0))
    with pytest.raises(ValueError):
        SampleSeries((1, 2), (0, 0))
    s = SampleSeries.from_unsorted((3, 1, 2), (30, 10, 20))
    assert s.y == (10.0, 20.0, 30.0)


@settings(max_examples=50)
@given(st.floats(-3, 3), st.floats(0.1, 10), st.floats(-5, 5), st.floats(-5, 5))
def test_fitters_exact_on_own_model(k, c, a, b):
    x = tuple(np.geomspace(0.5, 50, 6))
    kk, cc, _ = fit_power_law(SampleSeries(x, [c * v**k for v in x]))
    assert abs(kk - k) < 1e-10 and abs(cc - c) < 1e-9 * c
    aa, bb, _ = fit_log_law(SampleSeries(x, [a * math.log(2 / v) + b for v in x]), 2.0)
    assert abs(aa - a) < 1e-10 and abs(bb - b) < 1e-10
    fit = fit_two_term(SampleSeries(x, [a * v + b for v in x]), 1)
    assert fit.residual_norm < 1e-10


def test_stderr_shrinks_with_more_points():
    rng = np.random.default_rng(3)
    out = []
    for n in (6, 24, 96):
        errs = []
        for _ in range(200):
            x = np.geomspace(1, 100, n)
            y = 2 * x**1.5 * np.exp(rng.normal(0, 0.01, n))
            errs.append(fit_power_law(SampleSeries(tuple(x), tuple(y)))[2])
        out.append(np.mean(errs))
    assert out[0] > out[1] > out[2]
