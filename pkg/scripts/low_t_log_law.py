"""Fit eta_alpha(T) = a ln(mu/T) + b at low T and compare a with J/12 (1+alpha)/(2 alpha)."""

from dataclasses import dataclass

from fermi_ee import boundary as B
from fermi_ee.analysis import SampleSeries, fit_log_law
from fermi_ee.thermodynamics import IdealGas, ThermoPoint


@dataclass(frozen=True)
class Config:
    mu: float = 1.0
    alphas: tuple = (0.5, 1.0, 2.0)
    temperatures: tuple = (1e-4, 3e-4, 1e-3, 3e-3, 1e-2)


def main(cfg: Config = Config()):
    gas, dom = IdealGas(d=1), B.Domain.intervals((0.0, 1.0))
    J = B.fermi_surface_factor_J(gas, dom, cfg.mu)
    print("alpha,slope,intercept,predicted_slope,rel_dev")
    for a in cfg.alphas:
        etas = [B.eta_coefficient(gas, dom, a, ThermoPoint.fixed_mu(T, cfg.mu)) for T in cfg.temperatures]
        slope, icpt, _ = fit_log_law(SampleSeries(cfg.temperatures, etas), cfg.mu)
        want = J / 12 * (1 + a) / (2 * a)
        print(f"{a},{slope:.6f},{icpt:.6f},{want:.6f},{abs(slope / want - 1):.2e}")


if __name__ == "__main__":
    main()
