"""Log-log exponents of s_alpha and eta_alpha over T in [1e2, 1e4], fixed mu and fixed rho."""

from dataclasses import dataclass

from fermi_ee import boundary as B
from fermi_ee.analysis import SampleSeries, fit_power_law
from fermi_ee.thermodynamics import IdealGas, ThermoPoint, entropy_density


@dataclass(frozen=True)
class Config:
    d: int = 1
    mu: float = 1.0
    rho: float = 0.01
    alphas: tuple = (0.5, 1.0, 2.0, 3.0)
    temperatures: tuple = (1e2, 1e3, 1e4)


def main(cfg: Config = Config()):
    gas = IdealGas(d=cfg.d)
    dom = B.Domain.intervals((0.0, 1.0)) if cfg.d == 1 else B.Domain.ball(1.0, cfg.d)
    d = cfg.d
    print("quantity,mode,alpha,exponent,paper_exponent")
    for a in cfg.alphas:
        for mode in ("mu", "rho"):
            pts = [ThermoPoint.fixed_mu(T, cfg.mu) if mode == "mu" else ThermoPoint.fixed_rho(gas, T, cfg.rho)
                   for T in cfg.temperatures]
            s = [entropy_density(gas, a, p) for p in pts]
            eta = [B.eta_coefficient(gas, dom, a, p) for p in pts]
            ks = fit_power_law(SampleSeries(cfg.temperatures, s))[0]
            want_s = d / 2 if mode == "mu" else d / 2 * max(0.0, 1 - a)
            print(f"s,{mode},{a},{ks:.4f},{want_s:.4f}")
            want_e = (d - 1) / 2 if mode == "mu" else (d - 1) / 2 - d / 2 * min(a, 2.0)
            if min(eta) > 0:
                ke = fit_power_law(SampleSeries(cfg.temperatures, eta))[0]
                print(f"eta,{mode},{a},{ke:.4f},{want_e:.4f}")
            else:
                print(f"eta,{mode},{a},negative (min {min(eta):.3e}),{want_e:.4f}")


if __name__ == "__main__":
    main()
