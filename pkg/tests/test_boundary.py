import math

import numpy as np
import pytest
from scipy.special import expit

from fermi_ee import boundary as B
from fermi_ee.analysis import SampleSeries, fit_log_law, fit_power_law
from fermi_ee.errors import NoFermiSurfaceError
from fermi_ee.kernels import u_alpha_array
from fermi_ee.thermodynamics import IdealGas, ThermoPoint


def test_domain_geometry():
    d = B.Domain.intervals((0, 1), (2, 4), L=3.0)
    assert d.volume() == pytest.approx(9.0)
    assert d.boundary_area() == 4
    assert d.endpoint_count() == 4
    ball = B.Domain.ball(1.0, 3)
    assert ball.unit_boundary_area() == pytest.approx(4 * math.pi)
    assert ball.unit_volume() == pytest.approx(4 * math.pi / 3)
    box = B.Domain.box(1.0, 2.0, 3.0, L=2.0)
    assert box.volume() == pytest.approx(48.0)
    assert box.boundary_area() == pytest.approx(4 * 22.0)
    with pytest.raises(ValueError):
        B.Domain.intervals((0, 2), (1, 3))
    with pytest.raises(ValueError):
        B.Domain.intervals((0, 1), L=0.5)


def test_constant_profile_gives_zero():
    for c in (0.0, 0.3, 1.0):
        assert B.u_functional(1.0, B.SymbolProfile.constant(c)) == 0.0


def test_shift_invariance(gas1):
    prof = B.fermi_profile(gas1, 0.1, 1.0)
    a = B.u_functional(1.0, prof, 1e-9)
    b = B.u_functional(1.0, prof.shifted(3.7), 1e-9)
    assert b == pytest.approx(a, rel=1e-8)


def test_gaussian_profile_against_brute_force():
    # independent check: plain trapezoid on a fine grid plus the exact 1/|u-v| tail
    amp = 0.3
    prof = B.SymbolProfile(lambda v: amp * np.exp(-v * v), scale=2.0)
    got = B.u_functional(1.0, prof, 1e-9)
    h = 0.01
    u = np.arange(-8, 8 + h / 2, h)
    g = amp * np.exp(-u * u)
    U = u_alpha_array(1.0, g[:, None], g[None, :])
    diff = u[:, None] - u[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        K = U / diff**2
    # diagonal limit -h''(g) g'^2 / 2 with h_1'' = -1/(g(1-g))
    gp = -2 * u * g
    K[np.diag_indices_from(K)] = gp**2 / (2 * g * (1 - g))
    inner = K.sum() * h * h
    # outside [-8, 8] g vanishes; contribution 2 int U(g(u), 0) [1/(u+8) + 1/(8-u)] du
    tail = 2 * np.sum(u_alpha_array(1.0, g, 0.0) * (1 / (u + 8 + h / 2) + 1 / (8 + h / 2 - u))) * h
    brute = (inner + tail) / (8 * math.pi**2)
    assert got == pytest.approx(brute, rel=1e-3)


def test_low_T_scan_bounded(gas1):
    vals = []
    for T in (1e-2, 1e-3, 1e-4):
        vals.append(B.u_functional(1.0, B.fermi_profile(gas1, T, 1.0), 1e-8) - math.log(1 / T) / 6)
    assert max(vals) - min(vals) < 0.05


def test_eta_d1_is_endpoints_times_u(gas1, unit_interval):
    pt = ThermoPoint.fixed_mu(0.1, 1.0)
    eta = B.eta_coefficient(gas1, unit_interval, 1.0, pt, 1e-8)
    u = B.u_functional(1.0, B.fermi_profile(gas1, 0.1, 1.0), 1e-9)
    assert eta == pytest.approx(2 * u, rel=1e-8)
    two = B.Domain.intervals((0, 1), (5, 7))
    assert B.eta_coefficient(gas1, two, 1.0, pt, 1e-8) == pytest.approx(2 * eta, rel=1e-12)


def test_eta_tolerance_refinement(gas1, unit_interval):
    pt = ThermoPoint.fixed_mu(0.05, 1.0)
    v1, e1 = B.eta_coefficient_with_error(gas1, unit_interval, 1.0, pt, 1e-6)
    v2, _ = B.eta_coefficient_with_error(gas1, unit_interval, 1.0, pt, 5e-7)
    assert abs(v1 - v2) <= max(e1, 1e-12 * abs(v1))


def test_eta_nonnegative(gas1, unit_interval):
    for a in (0.5, 1.0, 2.0):
        for T, mu in ((0.1, 1.0), (1.0, -1.0), (10.0, 0.0)):
            assert B.eta_coefficient(gas1, unit_interval, a, ThermoPoint.fixed_mu(T, mu)) >= 0


def test_low_T_log_law(gas1, unit_interval):
    Ts = (3e-4, 1e-3, 3e-3, 1e-2)
    etas = [B.eta_coefficient(gas1, unit_interval, 1.0, ThermoPoint.fixed_mu(T, 1.0)) for T in Ts]
    a, _, _ = fit_log_law(SampleSeries(Ts, etas), 1.0)
    assert a == pytest.approx(1 / 3, rel=0.03)


def test_high_T_fixed_rho_alpha1(gas1, unit_interval):
    Ts = (1e2, 1e3, 1e4)
    etas = [B.eta_coefficient(gas1, unit_interval, 1.0, ThermoPoint.fixed_rho(gas1, T, 0.01)) for T in Ts]
    assert fit_power_law(SampleSeries(Ts, etas))[0] == pytest.approx(-0.5, abs=0.05)


def test_ball_and_box_with_equal_area_agree():
    g = IdealGas(d=2)
    pt = ThermoPoint.fixed_mu(1.0, 0.5)
    ball = B.Domain.ball(1.0, 2)
    box = B.Domain.box(math.pi / 2, math.pi / 2)
    assert box.unit_boundary_area() == pytest.approx(ball.unit_boundary_area())
    e1 = B.eta_coefficient(g, ball, 1.0, pt, 1e-6)
    e2 = B.eta_coefficient(g, box, 1.0, pt, 1e-6)
    assert e1 > 0
    assert e1 == pytest.approx(e2, rel=1e-12)


def test_J_examples(gas1, unit_interval):
    assert B.fermi_surface_factor_J(IdealGas(d=3), B.Domain.ball(1.0, 3), 1.0) == pytest.approx(4.0, abs=1e-12)
    assert B.fermi_surface_factor_J(gas1, unit_interval, 1.0) == 4.0
    with pytest.raises(NoFermiSurfaceError):
        B.fermi_surface_factor_J(gas1, unit_interval, -0.5)


def test_prediction_examples(gas1, unit_interval):
    assert B.eta_low_T_prediction(gas1, unit_interval, 1.0, 1.0, math.exp(-3)) == pytest.approx(1.0)
    r = B.eta_low_T_prediction(gas1, unit_interval, 2.0, 1.0, 1e-3) / B.eta_low_T_prediction(
        gas1, unit_interval, 1.0, 1.0, 1e-3
    )
    assert r == pytest.approx(0.75)
    with pytest.raises(NoFermiSurfaceError):
        B.eta_low_T_prediction(gas1, unit_interval, 1.0, -1.0, 0.1)


def test_eta_vanishes_for_negative_mu_as_T_drops(gas1, unit_interval):
    vals = [B.eta_coefficient(gas1, unit_interval, 1.0, ThermoPoint.fixed_mu(T, -1.0)) for T in (0.5, 0.2, 0.1)]
    assert vals[0] > vals[1] > vals[2]
    assert vals[2] < 1e-3


def test_diagonal_regularity(gas1):
    prof = B.fermi_profile(gas1, 0.1, 1.0)
    u = np.linspace(-2, 2, 101)
    gu, gv = prof(u), prof(u + 1e-6)
    U = u_alpha_array(1.0, gu, gv)
    Umax = np.max(u_alpha_array(1.0, gu[:, None], gu[None, :]))
    integrand = U / 1e-12
    assert np.all(np.isfinite(integrand))
    assert np.max(integrand) < 10 * Umax


def test_mesh_balanced(gas1):
    prof = B.fermi_profile(gas1, 1e-3, 1.0)
    a, b = B._support(prof, 1e-18)
    edges = B.build_mesh(prof, a, b, 1e-10)
    w = np.diff(edges)
    assert np.all(w > 0)
    assert np.all(w[1:] / w[:-1] <= 2.0 + 1e-12)
    assert np.all(w[:-1] / w[1:] <= 2.0 + 1e-12)


def test_profile_limits(gas1):
    prof = B.fermi_profile(gas1, 0.1, 1.0, k=0.5)
    assert prof(0.0) == pytest.approx(expit(-(0.125 - 1.0) / 0.1))
    assert prof(1e3) == 0.0
