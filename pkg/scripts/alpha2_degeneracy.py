"""Why eta_2 decays faster than T^-1 at fixed rho in d = 1.

For small occupations h_alpha(t) = [alpha t + (alpha/2) t^2 - t^alpha + ...]/(alpha - 1).
The nonlinear part is t^alpha for alpha < 2 and t^2 for alpha > 2; at alpha = 2
the two cancel and the leading nonlinearity is cubic.  U_alpha(r, t) scales
like the nonlinear part, and the profile amplitude is ~ rho T^(-1/2), so the
exponent of eta is -k/2 with k = alpha (alpha < 2), 3 (alpha = 2), 2 (alpha > 2).
"""

import math

from fermi_ee import boundary as B
from fermi_ee.analysis import SampleSeries, fit_power_law
from fermi_ee.kernels import u_alpha
from fermi_ee.thermodynamics import IdealGas, ThermoPoint


def main():
    print("alpha,U_scaling_power,eta_exponent,min_eta")
    gas, dom = IdealGas(d=1), B.Domain.intervals((0.0, 1.0))
    Ts = (1e2, 1e3, 1e4)
    for a in (1.5, 1.9, 2.0, 2.1, 2.5, 3.0):
        k = math.log10(abs(u_alpha(a, 1e-2, 2e-2, 1e-15) / u_alpha(a, 1e-3, 2e-3, 1e-18)))
        eta = [B.eta_coefficient(gas, dom, a, ThermoPoint.fixed_rho(gas, T, 0.01)) for T in Ts]
        e = fit_power_law(SampleSeries(Ts, [abs(v) for v in eta]))[0]
        print(f"{a},{k:.3f},{e:.4f},{min(eta):.3e}")


if __name__ == "__main__":
    main()
