import math

import numpy as np
import pytest

from fermi_ee import boundary as B
from fermi_ee import oracle as O
from fermi_ee.errors import ClampViolationError, ResolutionError, UnsupportedConfigurationError
from fermi_ee.thermodynamics import IdealGas, density, entropy_density


def test_kernel_diagonal_and_symmetry(gas1, unit_interval):
    K = O.build_reduced_kernel(gas1, (0.2, 1.0), unit_interval, 10.0)
    rho = density(gas1, 0.2, 1.0)
    diag = np.diag(K.entries) / K.weights
    np.testing.assert_allclose(diag, rho, rtol=1e-10)
    asym = np.max(np.abs(K.entries - K.entries.T)) / np.max(np.abs(K.entries))
    assert asym <= 1e-14
    assert np.sum(K.raw_eigenvalues()) == pytest.approx(rho * 10.0, rel=1e-8)


def test_kernel_decay_length(gas1):
    r = np.linspace(40, 80, 81)
    assert np.max(np.abs(O.kernel_function(gas1, 1.0, 1.0, r))) < 1e-12
    assert abs(O.kernel_function(gas1, 1.0, 1.0, np.array([5.0]))[0]) > 1e-6


def test_resolution_and_dimension_checks(gas1, unit_interval):
    with pytest.raises(ResolutionError):
        O.build_reduced_kernel(gas1, (0.1, 1.0), unit_interval, 10.0, n=2.0)
    with pytest.raises(UnsupportedConfigurationError):
        O.build_reduced_kernel(IdealGas(d=2), (0.1, 1.0), B.Domain.ball(1.0, 2), 2.0)


@pytest.mark.parametrize("T", [0.05, 0.5])
def test_eigenvalue_range_up_to_4x_default(gas1, unit_interval, T):
    n0 = O.default_nodes_per_length(gas1, T, 1.0)
    for f in (1, 2, 4):
        lam = O.build_reduced_kernel(gas1, (T, 1.0), unit_interval, 8.0, n=f * n0).raw_eigenvalues()
        assert lam.min() >= -1e-9 and lam.max() <= 1 + 1e-9


def test_nystrom_convergence(gas1, unit_interval):
    n0 = O.default_nodes_per_length(gas1, 0.05, 1.0)
    for a in (0.5, 1.0, 2.0):
        s1 = O.local_renyi_entropy(O.build_reduced_kernel(gas1, (0.05, 1.0), unit_interval, 20.0, n0), a)
        s2 = O.local_renyi_entropy(O.build_reduced_kernel(gas1, (0.05, 1.0), unit_interval, 20.0, 2 * n0), a)
        assert s2 == pytest.approx(s1, rel=1e-6)


def test_high_T_local_entropy_is_bulk_plus_boundary(gas1, unit_interval):
    # at T = 100 the correlation length is ~0.1, so even L = 1 is asymptotic;
    # the boundary term is still ~4% of the bulk term at L = 1
    T, mu = 100.0, 0.0
    s = entropy_density(gas1, 1.0, (T, mu))
    eta = B.eta_coefficient(gas1, unit_interval, 1.0, B.ThermoPoint.fixed_mu(T, mu))
    for L in (1.0, 4.0):
        S = O.local_renyi_entropy(O.build_reduced_kernel(gas1, (T, mu), unit_interval, L), 1.0)
        assert S == pytest.approx(s * L + eta, rel=1e-8)
    S4 = O.local_renyi_entropy(O.build_reduced_kernel(gas1, (T, mu), unit_interval, 4.0), 1.0)
    assert S4 == pytest.approx(s * 4.0, rel=0.011)


def test_renyi_ordering_and_empty(gas1, unit_interval):
    K = O.build_reduced_kernel(gas1, (0.1, 1.0), unit_interval, 10.0)
    assert O.local_renyi_entropy(K, 2.0) <= O.local_renyi_entropy(K, 1.0)
    empty = O.ReducedKernelMatrix(np.zeros(0), np.zeros(0), np.zeros((0, 0)), gas1, 0.1, 1.0, unit_interval, 1.0)
    assert O.local_renyi_entropy(empty, 1.0) == 0.0


def test_clamp_violation(gas1, unit_interval):
    bad = O.ReducedKernelMatrix(np.zeros(2), np.ones(2), np.diag([0.5, 1.1]), gas1, 0.1, 1.0, unit_interval, 1.0)
    with pytest.raises(ClampViolationError):
        O.local_renyi_entropy(bad, 1.0)


def test_regularized_trace_negativity_detected(gas1, unit_interval):
    K = O.build_reduced_kernel(gas1, (0.1, 1.0), unit_interval, 5.0)
    with pytest.raises(ResolutionError):
        O.regularized_trace(K, 1.0, 10.0)


@pytest.mark.parametrize("T", [0.1, 0.5])
@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_trace_nonnegative_and_converges_to_eta(gas1, unit_interval, alpha, T):
    bulk = entropy_density(gas1, alpha, (T, 1.0))
    for L in (1.0, 2.0, 4.0):
        K = O.build_reduced_kernel(gas1, (T, 1.0), unit_interval, L)
        assert O.regularized_trace(K, alpha, bulk) >= -1e-8
    tr = O.converged_regularized_trace(gas1, (T, 1.0), unit_interval, alpha)
    eta = B.eta_coefficient(gas1, unit_interval, alpha, B.ThermoPoint.fixed_mu(T, 1.0), 1e-8)
    assert tr.converged
    assert tr.value == pytest.approx(eta, rel=0.01)


def test_two_separated_intervals_add(gas1):
    one = O.converged_regularized_trace(gas1, (0.5, 1.0), B.Domain.intervals((0, 1)), 1.0, L0=20, max_size=3000)
    two = O.converged_regularized_trace(
        gas1, (0.5, 1.0), B.Domain.intervals((0, 1), (3, 4)), 1.0, L0=20, max_size=3000
    )
    assert two.value == pytest.approx(2 * one.value, rel=5e-3)


def test_scaling_study(gas1, unit_interval):
    fit = O.scaling_study(gas1, (0.1, 1.0), unit_interval, 1.0, [20, 40, 80, 160])
    assert fit.coefficient("bulk") == pytest.approx(entropy_density(gas1, 1.0, (0.1, 1.0)), rel=1e-3)
    eta = B.eta_coefficient(gas1, unit_interval, 1.0, B.ThermoPoint.fixed_mu(0.1, 1.0), 1e-8)
    assert fit.extra["eta_measured"] == pytest.approx(eta, rel=0.01)
    assert fit.extra["H_predicted"] == pytest.approx(2 * fit.extra["eta_measured"])
    with pytest.raises(ValueError):
        O.scaling_study(gas1, (0.1, 1.0), unit_interval, 1.0, [20, 40, 80])


def test_colder_oracle_tracks_log_growth(gas1, unit_interval):
    # eta grows by (1/3) ln 10 per decade of cooling at low T; compare T = 0.01 with 0.1
    hi = O.converged_regularized_trace(gas1, (0.1, 1.0), unit_interval, 1.0)
    lo = O.converged_regularized_trace(gas1, (0.01, 1.0), unit_interval, 1.0, L0=80, max_size=4000)
    e_hi = B.eta_coefficient(gas1, unit_interval, 1.0, B.ThermoPoint.fixed_mu(0.1, 1.0))
    e_lo = B.eta_coefficient(gas1, unit_interval, 1.0, B.ThermoPoint.fixed_mu(0.01, 1.0))
    assert lo.value - hi.value == pytest.approx(e_lo - e_hi, rel=0.01)
    assert e_lo - e_hi == pytest.approx(math.log(10) / 3, rel=0.1)
