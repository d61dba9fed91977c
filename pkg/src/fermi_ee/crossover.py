"""CFT-motivated crossover formula and its comparison with exact asymptotics.

    S(T, L) = L^(d-1) A ln[(T0/T) sinh(L T / (L0 T0))]

The formula is a phenomenological model; the report only measures how well its
limits match exact low-temperature coefficients and flags high-T disagreement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import SampleSeries, fit_log_law
from .boundary import Domain, eta_coefficient, fermi_surface_factor_J
from .kernels import check_alpha
from .thermodynamics import Dispersion, ThermoPoint, dos, entropy_density, low_temperature_report

SMALL_T_RTOL = 0.02
HIGH_T_FLAG = 0.10


def log_sinh(x):
    """ln sinh(x) for x > 0, finite for large x."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("log_sinh needs x > 0")
    out = x - math.log(2.0) + np.log(-np.expm1(-2.0 * x))
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class CrossoverParams:
    A_alpha: float
    L0: float
    T0: float
    d: int

    def __post_init__(self):
        if not (self.A_alpha >= 0 and self.L0 > 0 and self.T0 > 0 and self.d >= 1):
            raise ValueError("need A_alpha >= 0, L0 > 0, T0 > 0, d >= 1")

    @classmethod
    def from_system(cls, disp: Dispersion, dom: Domain, alpha: float, mu: float) -> "CrossoverParams":
        """A_alpha = (1+alpha)/(24 alpha) J, T0 = 1/(N'(mu)|Omega|), L0 = 3 A_1 / pi^2."""
        alpha = check_alpha(alpha)
        J = fermi_surface_factor_J(disp, dom, mu)
        A = (1 + alpha) / (24 * alpha) * J
        A1 = J / 12.0
        T0 = 1.0 / (float(dos(disp, mu)) * dom.unit_volume())
        return cls(A, 3 * A1 / math.pi**2, T0, disp.d)

    def small_T(self, L: float) -> float:
        return L ** (self.d - 1) * self.A_alpha * math.log(L / self.L0)

    def bulk_slope(self, T: float) -> float:
        return self.A_alpha * T / (self.L0 * self.T0)

    def boundary_constant(self, T: float) -> float:
        return self.A_alpha * math.log(self.T0 / (2 * T))


def crossover_entropy(p: CrossoverParams, L: float, T: float) -> float:
    if not (L > 0 and T > 0):
        raise ValueError("L and T must be positive")
    x = L * T / (p.L0 * p.T0)
    return float(L ** (p.d - 1) * p.A_alpha * (math.log(p.T0 / T) + log_sinh(x)))


@dataclass(frozen=True)
class CrossoverReport:
    params: CrossoverParams
    alpha: float
    bulk_slope_model: float
    bulk_slope_exact: float
    log_coefficient_model: float
    log_coefficient_exact: float
    high_T: float
    high_T_model_slope: float
    high_T_exact_density: float
    high_T_deviation: float

    @property
    def bulk_ratio(self) -> float:
        return self.bulk_slope_model / self.bulk_slope_exact

    @property
    def log_ratio(self) -> float:
        return self.log_coefficient_model / self.log_coefficient_exact

    @property
    def small_T_agrees(self) -> bool:
        return abs(self.bulk_ratio - 1) <= SMALL_T_RTOL and abs(self.log_ratio - 1) <= SMALL_T_RTOL

    @property
    def high_T_flagged(self) -> bool:
        return self.high_T_deviation > HIGH_T_FLAG

    def as_dict(self) -> dict:
        return {
            "A_alpha": self.params.A_alpha,
            "L0": self.params.L0,
            "T0": self.params.T0,
            "alpha": self.alpha,
            "bulk_slope_model": self.bulk_slope_model,
            "bulk_slope_exact": self.bulk_slope_exact,
            "bulk_ratio": self.bulk_ratio,
            "log_coefficient_model": self.log_coefficient_model,
            "log_coefficient_exact": self.log_coefficient_exact,
            "log_ratio": self.log_ratio,
            "small_T_agrees": self.small_T_agrees,
            "high_T": self.high_T,
            "high_T_model_slope": self.high_T_model_slope,
            "high_T_exact_density": self.high_T_exact_density,
            "high_T_deviation": self.high_T_deviation,
            "high_T_flagged": self.high_T_flagged,
        }


def crossover_consistency_report(disp: Dispersion, dom: Domain, alpha: float, mu: float,
                                 eta_temperatures=None, high_T_factor: float = 10.0,
                                 tol: float = 1e-7) -> CrossoverReport:
    """Compare the crossover limits with exact module outputs.

    Bulk: A T/(L0 T0) per unit L^d against the extrapolated s_alpha(T)/T |Omega|.
    Boundary and T = 0: A_alpha against the fitted coefficient of ln(mu/T) in
    eta_alpha(T) (identifying mu/T with L gives the T = 0 logarithm).
    High T: the bulk slope at T = high_T_factor * T0 against s_alpha(T) |Omega|.
    """
    alpha = check_alpha(alpha)
    p = CrossoverParams.from_system(disp, dom, alpha, mu)
    low = low_temperature_report(disp, alpha, mu=mu, tol=tol)
    bulk_exact = low.extrapolated * dom.unit_volume()
    if eta_temperatures is None:
        eta_temperatures = mu * np.array([3e-4, 1e-3, 3e-3, 1e-2])
    Ts = np.sort(np.asarray(eta_temperatures, dtype=float))
    etas = [eta_coefficient(disp, dom, alpha, ThermoPoint.fixed_mu(T, mu), 1e-6) for T in Ts]
    a, _, _ = fit_log_law(SampleSeries(tuple(Ts), tuple(etas)), mu)
    Th = high_T_factor * p.T0
    model_slope = p.bulk_slope(Th)
    exact = entropy_density(disp, alpha, (Th, mu), tol) * dom.unit_volume()
    return CrossoverReport(
        p, alpha, p.bulk_slope(1.0), bulk_exact, p.A_alpha, a, Th, model_slope, exact,
        abs(model_slope - exact) / exact,
    )
