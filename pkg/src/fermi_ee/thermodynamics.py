"""Dispersion models, integrated density of states and Fermi-gas thermodynamics.

Units: k_B = 1; hbar is a field of every dispersion (default 1).  Energy
integrals run over E in [0, max(mu, 0) + 745 T]; beyond that the Fermi
function underflows in double precision.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq
from scipy.special import expit, gamma

from .errors import BracketError, QuadratureError
from .kernels import _h_small, check_alpha

E_CUTOFF = 745.0


def unit_ball_volume(d: int) -> float:
    return math.pi ** (d / 2) / gamma(d / 2 + 1)


@dataclass(frozen=True, kw_only=True)
class Dispersion:
    """Isotropic dispersion eps(|p|) >= 0 in d dimensions."""

    d: int = 1
    hbar: float = 1.0

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.d!r}")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")

    # subclasses provide epsilon, momentum_at and optionally closed-form dos
    def epsilon(self, p):
        raise NotImplementedError

    def momentum_at(self, E: float) -> float:
        """Radius |p| of the level set eps = E (0 if E <= eps(0))."""
        raise NotImplementedError

    def _dos_prefactor(self) -> float:
        return unit_ball_volume(self.d) / (2 * math.pi * self.hbar) ** self.d

    def ids(self, E):
        E = np.asarray(E, dtype=float)
        p = np.vectorize(self.momentum_at, otypes=[float])(np.maximum(E, 0.0))
        return np.where(E > 0, self._dos_prefactor() * p**self.d, 0.0)

    def ids_prime(self, E):
        raise NotImplementedError

    def ids_second(self, E):
        raise NotImplementedError

    def restricted(self, d: int) -> "Dispersion":
        """Same radial eps in another dimension."""
        return replace(self, d=d)


@dataclass(frozen=True, kw_only=True)
class PowerLaw(Dispersion):
    """eps(p) = c |p|**gamma."""

    c: float = 0.5
    gamma: float = 2.0

    def __post_init__(self):
        super().__post_init__()
        if not (self.c > 0 and self.gamma > 0):
            raise ValueError("power-law dispersion needs c > 0 and gamma > 0")

    def epsilon(self, p):
        return self.c * np.abs(p) ** self.gamma

    def momentum_at(self, E):
        return (max(E, 0.0) / self.c) ** (1.0 / self.gamma)

    def ids(self, E):
        E = np.asarray(E, dtype=float)
        Ep = np.maximum(E, 0.0)
        return self._dos_prefactor() * (Ep / self.c) ** (self.d / self.gamma)

    def ids_prime(self, E):
        E = np.asarray(E, dtype=float)
        k = self.d / self.gamma
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(E > 0, k * self.ids(E) / E, 0.0)
        if k == 1.0:
            out = np.where(E > 0, self._dos_prefactor() / self.c, 0.0)
        return out

    def ids_second(self, E):
        E = np.asarray(E, dtype=float)
        k = self.d / self.gamma
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(E > 0, k * (k - 1) * self.ids(E) / E**2, 0.0)


@dataclass(frozen=True, kw_only=True)
class IdealGas(PowerLaw):
    """eps(p) = p^2 / (2 m)."""

    mass: float = 1.0
    c: float = field(init=False, default=0.5)
    gamma: float = field(init=False, default=2.0)

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        object.__setattr__(self, "c", 0.5 / self.mass)
        super().__post_init__()

    def ids(self, E):
        # Theta(E) / (d/2)! * (m E / 2 pi hbar^2)^(d/2)
        E = np.maximum(np.asarray(E, dtype=float), 0.0)
        return (self.mass * E / (2 * math.pi * self.hbar**2)) ** (self.d / 2) / gamma(self.d / 2 + 1)


@dataclass(frozen=True, kw_only=True)
class TabulatedIsotropic(Dispersion):
    """Radial samples (p_i, eps_i) with p_0 = 0, both strictly increasing.

    Beyond the last sample eps is continued by the power law through the last
    two samples.
    """

    p: tuple = (0.0, 1.0)
    eps: tuple = (0.0, 0.5)

    def __post_init__(self):
        super().__post_init__()
        p = np.asarray(self.p, dtype=float)
        e = np.asarray(self.eps, dtype=float)
        if p.size < 3 or p.size != e.size:
            raise ValueError("need at least three (p, eps) samples of equal length")
        if p[0] != 0.0 or np.any(np.diff(p) <= 0) or np.any(np.diff(e) <= 0) or e[0] < 0:
            raise ValueError("samples must start at p = 0 and be strictly increasing with eps >= 0")
        object.__setattr__(self, "p", tuple(p))
        object.__setattr__(self, "eps", tuple(e))
        tail = math.log(e[-1] / e[-2]) / math.log(p[-1] / p[-2])
        N = self._dos_prefactor() * p**self.d
        object.__setattr__(self, "_tail", tail)
        object.__setattr__(self, "_eps_of_p", PchipInterpolator(p, e, extrapolate=False))
        object.__setattr__(self, "_p_of_eps", PchipInterpolator(e, p, extrapolate=False))
        object.__setattr__(self, "_N", PchipInterpolator(e, N, extrapolate=False))

    def epsilon(self, p):
        p = np.abs(np.asarray(p, dtype=float))
        pmax, emax = self.p[-1], self.eps[-1]
        inside = np.clip(p, 0.0, pmax)
        return np.where(p <= pmax, self._eps_of_p(inside), emax * (p / pmax) ** self._tail)

    def momentum_at(self, E):
        if E <= self.eps[0]:
            return 0.0
        if E <= self.eps[-1]:
            return float(self._p_of_eps(E))
        return self.p[-1] * (E / self.eps[-1]) ** (1.0 / self._tail)

    def ids(self, E):
        E = np.asarray(E, dtype=float)
        emin, emax = self.eps[0], self.eps[-1]
        inside = self._N(np.clip(E, emin, emax))
        tail = self._N(emax) * (np.maximum(E, emax) / emax) ** (self.d / self._tail)
        return np.where(E <= emin, 0.0, np.where(E <= emax, inside, tail))

    def ids_prime(self, E):
        E = np.asarray(E, dtype=float)
        emin, emax = self.eps[0], self.eps[-1]
        k = self.d / self._tail
        inside = self._N.derivative()(np.clip(E, emin, emax))
        tail = k * self.ids(np.maximum(E, emax)) / np.maximum(E, emax)
        return np.where(E <= emin, 0.0, np.where(E <= emax, inside, tail))

    def ids_second(self, E):
        E = np.asarray(E, dtype=float)
        emin, emax = self.eps[0], self.eps[-1]
        k = self.d / self._tail
        inside = self._N.derivative(2)(np.clip(E, emin, emax))
        Et = np.maximum(E, emax)
        tail = k * (k - 1) * self.ids(Et) / Et**2
        return np.where(E <= emin, 0.0, np.where(E <= emax, inside, tail))

    def restricted(self, d: int) -> "TabulatedIsotropic":
        return TabulatedIsotropic(d=d, hbar=self.hbar, p=self.p, eps=self.eps)


def integrated_dos(disp: Dispersion, E):
    """Integrated density of states N(E); zero for E <= 0."""
    out = disp.ids(E)
    return out[()] if np.ndim(out) == 0 else out


def dos(disp: Dispersion, E):
    """Derivative N'(E)."""
    out = disp.ids_prime(E)
    return out[()] if np.ndim(out) == 0 else out


def _thermal_quad(func, T, mu, halfwidth, rtol):
    """T * int dx func(mu + T x, x) over E in [0, max(mu,0) + 745 T].

    Integrating in the scaled variable x = (E - mu)/T keeps x exact even when
    T << |mu|, where E - mu would lose most of its digits.
    """
    xlo = -mu / T
    xhi = (max(mu, 0.0) + E_CUTOFF * T - mu) / T
    cuts = sorted({min(max(c, xlo), xhi) for c in (xlo, -halfwidth, -4.0, 0.0, 4.0, halfwidth, xhi)})
    g = lambda x: func(mu + T * x, x)

    def run(epsrel, epsabs, limit):
        total = err = 0.0
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            if hi <= lo:
                continue
            if lo == xlo:
                # E = T y^2 near the band bottom removes half-integer power singularities of N, N'
                val, e = quad(lambda y: 2.0 * y * g(xlo + y * y), 0.0, math.sqrt(hi - lo),
                              epsabs=epsabs, epsrel=epsrel, limit=limit)
            else:
                val, e = quad(g, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=limit)
            total += val
            err += e
        return total, err

    # a coarse pass sets the absolute scale, so negligible segments are not
    # chased to full relative accuracy
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        scale = abs(run(1e-4, 0.0, 50)[0])
    total, err = run(rtol, 0.1 * rtol * scale, 400)
    if err > max(100 * rtol * abs(total), 1e-300):
        raise QuadratureError("thermal energy integral did not converge", estimate=T * total, error=T * err)
    return T * total, T * err


def _check_T(T):
    if not T > 0:
        raise ValueError(f"temperature must be positive, got {T!r}")


def pressure(disp: Dispersion, T: float, mu: float, tol: float = 1e-12) -> float:
    """Grand-canonical pressure p(T, mu) = int dE N(E) f_T(E - mu)."""
    _check_T(T)
    if mu + E_CUTOFF * T <= 0:
        return 0.0
    f = lambda E, x: float(disp.ids(E)) * expit(-x)
    return _thermal_quad(f, T, mu, 40.0, tol)[0]


def density(disp: Dispersion, T: float, mu: float, tol: float = 1e-12) -> float:
    """Particle density rho = dp/dmu, integrated by parts: int dE N(E) f (1 - f) / T."""
    _check_T(T)
    if mu + E_CUTOFF * T <= 0:
        return 0.0

    def f(E, x):
        return float(disp.ids(E)) * expit(x) * expit(-x) / T

    return _thermal_quad(f, T, mu, 40.0, tol)[0]


def entropy_of_occupation(alpha: float, x):
    """h_alpha(f(x)) with f(x) = 1/(1 + e^x), stable for large |x|."""
    return _h_small(alpha, expit(-np.abs(x)))


@dataclass(frozen=True)
class ThermoPoint:
    """Temperature plus chemical potential, optionally pinned by a density.

    ``constraint`` is "mu" or "rho"; for "rho" the stored ``mu`` is the resolved
    chemical potential and ``fermi_energy`` satisfies rho = N(fermi_energy).
    """

    T: float
    mu: float
    constraint: str = "mu"
    rho: float | None = None
    fermi_energy: float | None = None

    def __post_init__(self):
        _check_T(self.T)
        if self.constraint not in ("mu", "rho"):
            raise ValueError("constraint must be 'mu' or 'rho'")

    @classmethod
    def fixed_mu(cls, T: float, mu: float) -> "ThermoPoint":
        return cls(float(T), float(mu))

    @classmethod
    def fixed_rho(cls, disp: Dispersion, T: float, rho: float, tol: float = 1e-12) -> "ThermoPoint":
        mu = chemical_potential_from_density(disp, T, rho, tol)
        return cls(float(T), mu, "rho", float(rho), fermi_energy_of(disp, rho))


def entropy_density(disp: Dispersion, alpha: float, point, tol: float = 1e-12) -> float:
    """Renyi entropy density s_alpha(T) = int dE N'(E) h_alpha(f_T(E - mu)).

    ``point`` is a resolved ThermoPoint or a (T, mu) pair.
    """
    alpha = check_alpha(alpha)
    T, mu = _unpack(point)
    if mu + E_CUTOFF * T <= 0:
        return 0.0
    halfwidth = 40.0 / min(alpha, 1.0)
    f = lambda E, x: float(disp.ids_prime(E)) * float(entropy_of_occupation(alpha, x))
    return max(_thermal_quad(f, T, mu, halfwidth, tol)[0], 0.0)


def entropy_density_from_pressure(disp: Dispersion, alpha: float, point, tol: float = 1e-13) -> float:
    """s_alpha = alpha / ((alpha - 1) T) [p(T) - p(T/alpha)] for alpha != 1."""
    alpha = check_alpha(alpha)
    if alpha == 1.0:
        raise ValueError("the pressure identity needs alpha != 1")
    T, mu = _unpack(point)
    return alpha / ((alpha - 1.0) * T) * (pressure(disp, T, mu, tol) - pressure(disp, T / alpha, mu, tol))


def _unpack(point):
    if isinstance(point, ThermoPoint):
        return point.T, point.mu
    T, mu = point
    _check_T(T)
    return float(T), float(mu)


def fermi_energy_of(disp: Dispersion, rho: float) -> float:
    """eps_F with N(eps_F) = rho."""
    if not rho > 0:
        raise ValueError("density must be positive")
    if isinstance(disp, PowerLaw):
        return disp.c * (rho / disp._dos_prefactor()) ** (disp.gamma / disp.d)
    hi = 1.0
    while float(disp.ids(hi)) < rho:
        hi *= 2.0
        if hi > 1e300:
            raise BracketError("density exceeds the range of the dispersion table")
    return brentq(lambda E: float(disp.ids(E)) - rho, 0.0, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps)


def chemical_potential_from_density(disp: Dispersion, T: float, rho: float, tol: float = 1e-12) -> float:
    """Invert rho = dp/dmu for mu at fixed T by bracketing and Brent's method.

    Raises:
        BracketError: if no bracket is found (density not representable).
    """
    _check_T(T)
    if not rho > 0:
        raise ValueError("density must be positive")
    target = math.log(rho)

    def phi(mu):
        r = density(disp, T, mu)
        return (math.log(r) if r > 0 else -math.inf) - target

    with np.errstate(over="ignore"):
        guess = fermi_energy_of(disp, rho)
    if not math.isfinite(guess) or guess > 1e300:
        raise BracketError(f"density {rho!r} is not representable: Fermi energy overflows")
    lo = hi = guess
    step = max(T, 1e-3 * abs(guess), 1e-300)
    for _ in range(2000):
        if phi(lo) < 0:
            break
        lo -= step
        step *= 2.0
    else:
        raise BracketError("could not bracket mu from below")
    step = max(T, 1e-3 * abs(guess), 1e-300)
    for _ in range(2000):
        if phi(hi) > 0:
            break
        hi += step
        step *= 2.0
    else:
        raise BracketError("could not bracket mu from above")
    mu = brentq(phi, lo, hi, xtol=1e-15 * T, rtol=4 * np.finfo(float).eps, maxiter=500)
    got = density(disp, T, mu)
    if abs(got - rho) > max(tol, 1e-14) * rho:
        raise BracketError(f"mu inversion reached relative residual {abs(got - rho) / rho:.3g}")
    return mu


@dataclass(frozen=True)
class LowTemperatureReport:
    alpha: float
    temperatures: tuple
    slopes: tuple
    extrapolated: float
    predicted: float
    relative_deviation: float
    activated: bool


def low_temperature_report(disp: Dispersion, alpha: float, mu: float | None = None, rho: float | None = None,
                           temperatures=None, tol: float = 1e-12) -> LowTemperatureReport:
    """Compare s_alpha(T)/T, extrapolated to T -> 0, with the Sommerfeld slope.

    The limit is taken from a fit a + b T^2 through the three smallest
    temperatures.  For fixed density the reference energy is eps_F.
    """
    alpha = check_alpha(alpha)
    if (mu is None) == (rho is None):
        raise ValueError("give exactly one of mu or rho")
    ref = mu if mu is not None else fermi_energy_of(disp, rho)
    scale = abs(ref) if ref != 0 else 1.0
    if temperatures is None:
        temperatures = scale * np.array([0.04, 0.02, 0.01, 0.005])
    temperatures = np.sort(np.asarray(temperatures, dtype=float))[::-1]
    slopes = []
    for T in temperatures:
        m = mu if mu is not None else chemical_potential_from_density(disp, T, rho, tol)
        slopes.append(entropy_density(disp, alpha, (T, m), tol) / T)
    slopes = np.array(slopes)
    Ts = temperatures[-3:]
    A = np.column_stack([np.ones(3), Ts**2])
    a, _ = np.linalg.lstsq(A, slopes[-3:], rcond=None)[0]
    factor = (1 + alpha) / (2 * alpha)
    predicted = math.pi**2 / 3 * float(disp.ids_prime(ref)) * factor if ref > 0 else 0.0
    activated = ref <= 0
    dev = abs(a - predicted) / predicted if predicted > 0 else float("nan")
    return LowTemperatureReport(alpha, tuple(temperatures), tuple(slopes), float(a), predicted, dev, activated)
