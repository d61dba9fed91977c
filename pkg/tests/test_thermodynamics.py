import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fermi_ee.analysis import SampleSeries, fit_power_law
from fermi_ee.errors import BracketError
from fermi_ee.thermodynamics import (
    IdealGas,
    PowerLaw,
    TabulatedIsotropic,
    ThermoPoint,
    chemical_potential_from_density,
    density,
    dos,
    entropy_density,
    entropy_density_from_pressure,
    fermi_energy_of,
    integrated_dos,
    low_temperature_report,
    pressure,
)

G1 = IdealGas(d=1)


def mp_density_d1(T, mu):
    # rho = (1/pi) int_0^inf f_T(p^2/2 - mu) dp
    mp.mp.dps = 30
    f = lambda p: 1 / (1 + mp.exp((p * p / 2 - mu) / T))
    pf = mp.sqrt(2 * max(mu, 0)) if mu > 0 else 0
    pts = [0, pf, pf + 10 * mp.sqrt(T), mp.inf] if mu > 0 else [0, mp.inf]
    return float(mp.quad(f, pts) / mp.pi)


def test_ids_examples():
    assert integrated_dos(G1, 1.0) == pytest.approx(math.sqrt(2) / math.pi, rel=1e-15)
    assert integrated_dos(G1, -1.0) == 0.0
    g3 = IdealGas(d=3)
    want = (1 / math.gamma(2.5)) * (2 * math.pi) ** -1.5
    assert integrated_dos(g3, 1.0) == pytest.approx(want, rel=1e-14)
    assert want == pytest.approx(0.0477633, abs=1e-7)


def test_ids_monte_carlo_ball_volume():
    # fraction of the cube [-s, s]^3 with |p|^2/2 <= 1
    rng = np.random.default_rng(7)
    s = math.sqrt(2)
    p = rng.uniform(-s, s, size=(400_000, 3))
    frac = np.mean(np.sum(p**2, axis=1) <= 2.0)
    vol = frac * (2 * s) ** 3 / (2 * math.pi) ** 3
    assert vol == pytest.approx(float(integrated_dos(IdealGas(d=3), 1.0)), rel=5e-3)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_ideal_gas_matches_power_law_and_table(d):
    g = IdealGas(d=d, mass=1.7, hbar=0.8)
    pl = PowerLaw(d=d, hbar=0.8, c=0.5 / 1.7, gamma=2.0)
    E = np.linspace(-1, 5, 13)
    np.testing.assert_allclose(g.ids(E), pl.ids(E), rtol=1e-13)
    pgrid = np.linspace(0, 6, 400)
    tab = TabulatedIsotropic(d=d, hbar=0.8, p=tuple(pgrid), eps=tuple(pgrid**2 / 3.4))
    E = np.linspace(0.1, 8, 20)
    np.testing.assert_allclose(tab.ids(E), g.ids(E), rtol=1e-5)
    np.testing.assert_allclose(tab.ids_prime(E), g.ids_prime(E), rtol=1e-3)


def test_tabulated_dos_nonnegative():
    p = np.linspace(0, 3, 30)
    tab = TabulatedIsotropic(d=2, p=tuple(p), eps=tuple(p**2 / 2 + 0.3 * p**4))
    E = np.linspace(0, 30, 300)
    assert np.all(tab.ids_prime(E) >= 0)
    assert np.all(np.diff(tab.ids(E)) >= 0)


def test_pressure_examples():
    assert pressure(G1, 1e-6, 1.0) == pytest.approx(2 / 3 * math.sqrt(2) / math.pi, abs=1e-4)
    assert pressure(G1, 1.0, -12.0) == pytest.approx(math.exp(-12) / math.sqrt(2 * math.pi), rel=1e-4)
    assert pressure(G1, 1.0, -1e4) == 0.0


@pytest.mark.parametrize("T,mu", [(1.0, -1.0), (1.0, 0.0), (0.5, 1.0), (2.0, 3.0), (0.05, 1.0)])
def test_density_against_independent_quadrature(T, mu):
    assert density(G1, T, mu) == pytest.approx(mp_density_d1(T, mu), rel=1e-11)


@pytest.mark.parametrize("T,mu", [(1.0, -1.0), (1.0, 0.0), (3.0, -0.5)])
def test_density_and_pressure_polylog(T, mu):
    mp.mp.dps = 30
    z = mp.e ** (mu / T)
    rho = -mp.sqrt(T / (2 * mp.pi)) * mp.polylog(0.5, -z)
    p = -T * mp.sqrt(T / (2 * mp.pi)) * mp.polylog(1.5, -z)
    assert density(G1, T, mu) == pytest.approx(float(rho), rel=1e-12)
    assert pressure(G1, T, mu) == pytest.approx(float(p), rel=1e-12)


def test_entropy_examples():
    s2 = entropy_density(G1, 2.0, (0.7, 0.4))
    assert s2 == pytest.approx(2 / 0.7 * (pressure(G1, 0.7, 0.4) - pressure(G1, 0.35, 0.4)), rel=1e-8)
    s = entropy_density(G1, 1.0, (1e-3, 1.0))
    assert s / 1e-3 == pytest.approx(0.740480, rel=1e-3)
    assert entropy_density(G1, 1.0, ThermoPoint.fixed_mu(0.3, -2.0)) >= 0


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("alpha", [0.5, 2.0, 3.0])
def test_pressure_identity(d, alpha):
    g = IdealGas(d=d)
    for T in (0.1, 1.0, 10.0):
        for mu in (-1.0, 0.0, 1.0):
            s = entropy_density(g, alpha, (T, mu))
            assert s == pytest.approx(entropy_density_from_pressure(g, alpha, (T, mu)), rel=1e-7)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([0.5, 1.0, 2.0]), st.floats(0.01, 50), st.floats(-5, 5))
def test_entropy_nonnegative(alpha, T, mu):
    assert entropy_density(G1, alpha, (T, mu)) >= 0


def test_mu_inversion_examples():
    assert chemical_potential_from_density(G1, 1e-6, 1.0) == pytest.approx(math.pi**2 / 2, abs=1e-4)
    for T in np.geomspace(1e-2, 1e2, 5):
        for rho in np.geomspace(1e-2, 1e1, 5):
            mu = chemical_potential_from_density(G1, float(T), float(rho))
            assert density(G1, float(T), mu) == pytest.approx(float(rho), rel=1e-10)


def test_mu_low_T_correction():
    eF = fermi_energy_of(G1, 1.0)
    Ts = np.array([1e-2, 5e-3, 2.5e-3])
    shift = np.array([chemical_potential_from_density(G1, float(T), 1.0) - eF for T in Ts])
    _, c = np.polyfit(Ts**2, shift / Ts**2, 1)
    want = -(math.pi**2 / 6) * float(G1.ids_second(eF)) / float(G1.ids_prime(eF))
    assert c == pytest.approx(want, rel=0.02)


def test_mu_inversion_bracket_failure():
    with pytest.raises(BracketError):
        chemical_potential_from_density(G1, 1.0, 1e300)


def test_fixed_rho_point_records_fermi_energy():
    pt = ThermoPoint.fixed_rho(G1, 0.1, 1.0)
    assert pt.fermi_energy == pytest.approx(math.pi**2 / 2)
    assert density(G1, 0.1, pt.mu) == pytest.approx(1.0, rel=1e-10)


def test_pressure_convex_nondecreasing_in_mu():
    mus = np.linspace(-3, 3, 25)
    p = np.array([pressure(G1, 0.5, m) for m in mus])
    assert np.all(np.diff(p) > 0)
    assert np.all(np.diff(p, 2) >= -1e-12)


def test_low_temperature_report():
    r1 = low_temperature_report(G1, 1.0, mu=1.0)
    assert r1.extrapolated == pytest.approx(0.740480, rel=5e-3)
    r2 = low_temperature_report(G1, 2.0, mu=1.0)
    assert r2.extrapolated == pytest.approx(0.740480 * 0.75, rel=5e-3)
    act = low_temperature_report(G1, 1.0, mu=-1.0)
    assert act.activated
    assert act.slopes[-1] < 1e-20


HIGH_T = (1e2, 1e3, 1e4)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_high_T_exponents(d):
    g = IdealGas(d=d)
    s = [entropy_density(g, 1.0, (T, 1.0)) for T in HIGH_T]
    assert fit_power_law(SampleSeries(HIGH_T, s))[0] == pytest.approx(d / 2, abs=0.05)
    for a in (0.5, 2.0):
        s = [entropy_density(g, a, ThermoPoint.fixed_rho(g, T, 0.01)) for T in HIGH_T]
        assert fit_power_law(SampleSeries(HIGH_T, s))[0] == pytest.approx(d / 2 * max(0, 1 - a), abs=0.05)


def test_fixed_rho_entropy_grows_logarithmically():
    s = [entropy_density(G1, 1.0, ThermoPoint.fixed_rho(G1, T, 0.01)) for T in (1e2, 1e3, 1e4)]
    assert (s[2] - s[1]) == pytest.approx(s[1] - s[0], rel=0.02)
