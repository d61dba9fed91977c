"""Surface-entropy coefficient eta_alpha and the one-dimensional functional U_alpha[g].

The double integral

    U_alpha[g] = 1/(8 pi^2) * int int du dv  U_alpha(g(u), g(v)) / (u - v)^2

has a continuous integrand (U_alpha vanishes quadratically on the diagonal), so
it is evaluated by a tensor-product Gauss-Legendre rule on a panel mesh that
resolves g.  The mesh is 2:1 balanced, which grades it geometrically towards
every sharp feature of g and keeps the 1/(u-v)^2 coupling between neighbouring
panels resolved.  The u- and v-rules use different node counts so no node pair
lies on the diagonal.  Outside the support window [a, b] of g - limit the
profile is constant and the remaining v-integral is done in closed form.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import expit, gamma

from .errors import NoFermiSurfaceError, QuadratureError, UnsupportedConfigurationError
from .kernels import check_alpha, u_alpha_array
from .thermodynamics import Dispersion, IdealGas, ThermoPoint, integrated_dos

_NODES_U = 10
_NODES_V = 11


@dataclass(frozen=True)
class Domain:
    """Bounded region at unit scale, plus the scale factor L.

    ``shape`` is one of ``("intervals", ((a0, b0), (a1, b1), ...))`` for d = 1,
    ``("ball", R)`` or ``("box", (l1, ..., ld))``.
    """

    kind: str
    params: tuple
    d: int
    L: float = 1.0

    def __post_init__(self):
        if self.L < 1.0:
            raise ValueError("scale L must be >= 1")
        if self.kind == "intervals":
            if self.d != 1:
                raise ValueError("interval unions are one-dimensional")
            ivs = tuple((float(a), float(b)) for a, b in self.params)
            if not ivs:
                raise ValueError("need at least one interval")
            for (a, b) in ivs:
                if not a < b:
                    raise ValueError(f"interval ({a}, {b}) is not ordered")
            for (_, b0), (a1, _) in zip(ivs, ivs[1:]):
                if not b0 < a1:
                    raise ValueError("intervals must be disjoint and sorted")
            object.__setattr__(self, "params", ivs)
        elif self.kind == "ball":
            if self.d < 2:
                raise ValueError("use intervals for d = 1")
            (R,) = self.params
            if not R > 0:
                raise ValueError("ball radius must be positive")
        elif self.kind == "box":
            if len(self.params) != self.d or min(self.params) <= 0:
                raise ValueError("box needs d positive edge lengths")
        else:
            raise ValueError(f"unknown domain kind {self.kind!r}")

    @classmethod
    def intervals(cls, *ivs, L: float = 1.0) -> "Domain":
        return cls("intervals", tuple(ivs), 1, L)

    @classmethod
    def ball(cls, R: float, d: int, L: float = 1.0) -> "Domain":
        return cls("ball", (float(R),), d, L)

    @classmethod
    def box(cls, *edges: float, L: float = 1.0) -> "Domain":
        return cls("box", tuple(float(e) for e in edges), len(edges), L)

    def unit_volume(self) -> float:
        if self.kind == "intervals":
            return sum(b - a for a, b in self.params)
        if self.kind == "ball":
            R = self.params[0]
            return math.pi ** (self.d / 2) / gamma(self.d / 2 + 1) * R**self.d
        return float(np.prod(self.params))

    def unit_boundary_area(self) -> float:
        """|dOmega| at L = 1; for d = 1 the number of endpoints."""
        if self.kind == "intervals":
            return 2.0 * len(self.params)
        if self.kind == "ball":
            R = self.params[0]
            return 2 * math.pi ** (self.d / 2) / gamma(self.d / 2) * R ** (self.d - 1)
        e = np.asarray(self.params)
        return float(sum(2 * np.prod(np.delete(e, i)) for i in range(self.d)))

    def volume(self) -> float:
        return self.unit_volume() * self.L**self.d

    def boundary_area(self) -> float:
        return self.unit_boundary_area() * self.L ** (self.d - 1)

    def endpoint_count(self) -> int:
        if self.kind != "intervals":
            raise ValueError("endpoint count is defined for interval unions only")
        return 2 * len(self.params)

    def scaled(self, L: float) -> "Domain":
        return Domain(self.kind, self.params, self.d, L)


@dataclass(frozen=True)
class SymbolProfile:
    """A map v -> g(v) in [0, 1] that tends to ``limit`` as v -> +-infinity.

    ``scale`` and ``center`` seed the support search; ``hints`` are points where
    g is known to vary quickly and are inserted as mesh breakpoints.
    """

    g: Callable[[np.ndarray], np.ndarray]
    center: float = 0.0
    scale: float = 1.0
    limit: float = 0.0
    hints: tuple = field(default=())

    def __call__(self, v):
        return self.g(np.asarray(v, dtype=float))

    def shifted(self, c: float) -> "SymbolProfile":
        g = self.g
        return SymbolProfile(
            lambda v: g(v - c), self.center + c, self.scale, self.limit, tuple(h + c for h in self.hints)
        )

    @classmethod
    def constant(cls, c: float) -> "SymbolProfile":
        return cls(lambda v: np.full(np.shape(v), float(c)), limit=float(c))


def fermi_profile(disp: Dispersion, T: float, mu: float, k: float = 0.0) -> SymbolProfile:
    """Profile v -> f_T(eps(sqrt(k^2 + v^2)) - mu) at frozen transverse momentum k."""
    if not T > 0:
        raise ValueError("temperature must be positive")
    eps = disp.epsilon

    def g(v):
        return expit(-(eps(np.hypot(k, v)) - mu) / T)

    hints = []
    p_scale = disp.momentum_at(max(mu, 0.0) + 40.0 * T)
    if mu > 0 and eps(np.array(k)) < mu:
        vf = math.sqrt(max(disp.momentum_at(mu) ** 2 - k * k, 0.0))
        if vf > 0:
            hints = [-vf, vf]
    return SymbolProfile(g, 0.0, max(p_scale, 1e-300), 0.0, tuple(hints))


def _gl(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


_GL_U = _gl(_NODES_U)
_GL_V = _gl(_NODES_V)


def _bary_matrix(src, dst):
    # Lagrange interpolation matrix from nodes src to points dst
    src = np.asarray(src)
    w = np.array([1.0 / np.prod(src[j] - np.delete(src, j)) for j in range(src.size)])
    diff = dst[:, None] - src[None, :]
    M = w / diff
    return M / M.sum(axis=1, keepdims=True)


_INTERP_UV = _bary_matrix(_GL_U[0], _GL_V[0])


def _support(profile: SymbolProfile, cut: float):
    lo = profile.center - profile.scale
    hi = profile.center + profile.scale
    for h in profile.hints:
        lo = min(lo, h - profile.scale)
        hi = max(hi, h + profile.scale)
    step = max(profile.scale, hi - lo)
    for _ in range(200):
        if abs(float(profile(lo)) - profile.limit) <= cut:
            break
        step *= 2.0
        lo -= step
    else:
        raise QuadratureError("profile does not settle to its limit on the left")
    step = max(profile.scale, hi - lo)
    for _ in range(200):
        if abs(float(profile(hi)) - profile.limit) <= cut:
            break
        step *= 2.0
        hi += step
    else:
        raise QuadratureError("profile does not settle to its limit on the right")
    return lo, hi


def _panel_ok(profile, a, b, gtol):
    xu, _ = _GL_U
    xv, _ = _GL_V
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    gu = profile(mid + half * xu)
    gv = profile(mid + half * xv)
    err = np.max(np.abs(_INTERP_UV @ gu - gv))
    errs = np.max(np.abs(_INTERP_UV @ np.sqrt(gu) - np.sqrt(gv)))
    return err <= gtol and errs <= 10.0 * gtol


def build_mesh(profile: SymbolProfile, a: float, b: float, gtol: float, initial: int = 16):
    """Adaptive, 2:1 balanced panel breakpoints on [a, b] resolving ``profile``."""
    pts = set(np.linspace(a, b, initial + 1).tolist())
    pts.update(h for h in profile.hints if a < h < b)
    edges = sorted(pts)
    min_width = (b - a) * 1e-14
    panels = list(zip(edges[:-1], edges[1:]))
    done = []
    while panels:
        nxt = []
        for (p, q) in panels:
            if q - p <= min_width or _panel_ok(profile, p, q, gtol):
                done.append((p, q))
            else:
                m = 0.5 * (p + q)
                nxt += [(p, m), (m, q)]
        panels = nxt
    edges = np.array(sorted({p for p, _ in done} | {b}))
    return _balance(edges)


def _balance(edges):
    while True:
        w = np.diff(edges)
        too_big = np.zeros(w.size, dtype=bool)
        too_big[:-1] |= w[:-1] > 2.0 * w[1:]
        too_big[1:] |= w[1:] > 2.0 * w[:-1]
        if not too_big.any():
            return edges
        mids = 0.5 * (edges[:-1] + edges[1:])[too_big]
        edges = np.sort(np.concatenate([edges, mids]))


def _nodes(edges, rule):
    x, w = rule
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()


def _g_cut(alpha):
    # U(g, limit) ~ g**min(alpha, 1) for small deviations
    return min(1e-18, 1e-17 ** (1.0 / min(alpha, 1.0)))


def _u_double_sum(alpha, edges, profile, a, b, rules=(_GL_U, _GL_V)):
    u, wu = _nodes(edges, rules[0])
    v, wv = _nodes(edges, rules[1])
    gu = np.clip(profile(u), 0.0, 1.0)
    gv = np.clip(profile(v), 0.0, 1.0)
    # U only depends on the profile values; evaluate on the unique values once
    ru, iu = np.unique(gu, return_inverse=True)
    rv, iv = np.unique(gv, return_inverse=True)
    table = u_alpha_array(alpha, ru[:, None], rv[None, :])
    total = 0.0
    chunk = max(1, 4_000_000 // max(v.size, 1))
    for s in range(0, u.size, chunk):
        sl = slice(s, s + chunk)
        du = u[sl, None] - v[None, :]
        total += np.einsum("i,ij,j->", wu[sl], table[iu[sl]][:, iv] / (du * du), wv)
    lim = profile.limit
    ulim = u_alpha_array(alpha, ru, lim)[iu]
    tails = np.sum(wu * ulim * (1.0 / (u - a) + 1.0 / (b - u)))
    return total + 2.0 * tails


def u_functional_with_error(alpha: float, profile: SymbolProfile, tol: float = 1e-8, max_refine: int = 3):
    """U_alpha[g] and an error estimate from a lower-order rule pair on the same mesh.

    Returns:
        (value, error_estimate)

    Raises:
        QuadratureError: if the estimate stays above ``tol`` (relative, with an
            absolute floor of 1e-14) after ``max_refine`` uniform mesh halvings.
    """
    alpha = check_alpha(alpha)
    if not tol > 0:
        raise ValueError("tol must be positive")
    a, b = _support(profile, _g_cut(alpha))
    gtol = min(1e-10, tol * 1e-2)
    edges = build_mesh(profile, a, b, gtol)
    lo_rules = (_gl(_NODES_U - 2), _gl(_NODES_V - 2))
    for _ in range(max_refine + 1):
        val = _u_double_sum(alpha, edges, profile, a, b)
        coarse = _u_double_sum(alpha, edges, profile, a, b, lo_rules)
        err = abs(val - coarse)
        if err <= tol * abs(val) + 1e-14:
            return val / (8.0 * math.pi**2), err / (8.0 * math.pi**2)
        edges = np.sort(np.concatenate([edges, 0.5 * (edges[:-1] + edges[1:])]))
    raise QuadratureError(
        f"U functional did not reach relative tolerance {tol:g}",
        estimate=val / (8.0 * math.pi**2),
        error=err / (8.0 * math.pi**2),
    )


def u_functional(alpha: float, profile: SymbolProfile, tol: float = 1e-8) -> float:
    """Widom-type coefficient U_alpha[g] = (8 pi^2)^-1 int int U_alpha(g(u), g(v)) / (u-v)^2."""
    return u_functional_with_error(alpha, profile, tol)[0]


def _sphere_measure(n: int) -> float:
    """Surface measure of the unit n-sphere in R^(n+1); the 0-sphere counts 2 points."""
    return 2.0 * math.pi ** ((n + 1) / 2) / gamma((n + 1) / 2)


def _check_isotropic(disp: Dispersion):
    if not getattr(disp, "isotropic", True):
        raise UnsupportedConfigurationError(
            "unsupported-configuration: anisotropic dispersions are only supported in d = 1"
        )


def _radial_panels(disp: Dispersion, T: float, mu: float, kmax: float):
    """Breakpoints in the transverse momentum k for the radial integral."""
    pts = {0.0, kmax}
    for y in (-40.0, -20.0, -10.0, -5.0, -2.0, -1.0, 0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0):
        E = mu + y * T
        if E > 0:
            pts.add(disp.momentum_at(E))
    if mu < 0:
        # Boltzmann tail: the k-profile decays on the scale eps(k) ~ T
        for y in (0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0):
            pts.add(disp.momentum_at(y * T))
    if mu > 0:
        kf = disp.momentum_at(mu)
        slope = (float(disp.epsilon(kf * (1 + 1e-6))) - mu) / (kf * 1e-6)
        width = T / max(slope, 1e-300)
        gap = 0.5 * kf
        while gap > width:
            pts.add(kf - gap)
            pts.add(kf + gap)
            gap *= 0.5
    return np.array(sorted(p for p in pts if 0.0 <= p <= kmax))


def eta_coefficient_with_error(disp: Dispersion, dom: Domain, alpha: float, point: ThermoPoint,
                               tol: float = 1e-6):
    """Boundary coefficient eta_alpha(T, dOmega) at unit scale and an error estimate.

    d = 1: U_alpha[f_T o (eps - mu)] times the number of endpoints.  d >= 2
    (isotropic eps only): |dOmega| (2 pi hbar)^(1-d) omega_(d-2) int_0^inf dk
    k^(d-2) U_alpha[v -> f_T(eps(sqrt(k^2 + v^2)) - mu)].
    """
    alpha = check_alpha(alpha)
    if dom.d != disp.d:
        raise ValueError("domain and dispersion dimensions differ")
    _check_isotropic(disp)
    T, mu = point.T, point.mu
    if disp.d == 1:
        val, err = u_functional_with_error(alpha, fermi_profile(disp, T, mu), tol)
        n = dom.endpoint_count()
        return n * val, n * err
    d = disp.d
    xcut = -math.log(_g_cut(alpha))
    kmax = disp.momentum_at(max(mu, 0.0) + xcut * T)
    edges = _radial_panels(disp, T, mu, kmax)
    hi_x, hi_w = _gl(8)
    lo_x, lo_w = _gl(5)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    cache = {}

    def integrate(x, w):
        total = 0.0
        for m, hw in zip(mid, half):
            for xi, wi in zip(x, w):
                k = m + hw * xi
                if k not in cache:
                    cache[k] = u_functional_with_error(alpha, fermi_profile(disp, T, mu, k), tol * 0.1)[0]
                total += hw * wi * k ** (d - 2) * cache[k]
        return total

    hi = integrate(hi_x, hi_w)
    lo = integrate(lo_x, lo_w)
    pref = dom.unit_boundary_area() * (2 * math.pi * disp.hbar) ** (1 - d) * _sphere_measure(d - 2)
    return pref * hi, pref * abs(hi - lo)


def eta_coefficient(disp: Dispersion, dom: Domain, alpha: float, point: ThermoPoint, tol: float = 1e-6) -> float:
    """Boundary coefficient eta_alpha(T, dOmega); see ``eta_coefficient_with_error``."""
    val, err = eta_coefficient_with_error(disp, dom, alpha, point, tol)
    if err > max(tol * abs(val), 1e-12) * 100:
        warnings.warn(f"eta error estimate {err:.3g} exceeds requested tolerance", RuntimeWarning)
    return val


def fermi_surface_factor_J(disp: Dispersion, dom: Domain, mu: float) -> float:
    """Geometric factor J = 2 N_(d-1)(mu) |dOmega| for isotropic eps.

    For d = 1, N_0 = 1 per Fermi level, so J = 2 x (number of endpoints), i.e.
    two Fermi points times the endpoint count.

    Raises:
        NoFermiSurfaceError: if N(mu) = 0.
    """
    _check_isotropic(disp)
    if dom.d != disp.d:
        raise ValueError("domain and dispersion dimensions differ")
    if not float(disp.ids(mu)) > 0:
        raise NoFermiSurfaceError(f"no Fermi surface at mu = {mu}; eta vanishes as T -> 0")
    if disp.d == 1:
        return 2.0 * dom.endpoint_count()
    return 2.0 * float(disp.restricted(disp.d - 1).ids(mu)) * dom.unit_boundary_area()


def eta_low_T_prediction(disp: Dispersion, dom: Domain, alpha: float, mu: float, T: float) -> float:
    """Leading low-temperature law (1/12) (1+alpha)/(2 alpha) J ln(mu/T)."""
    alpha = check_alpha(alpha)
    if not T > 0:
        raise ValueError("temperature must be positive")
    J = fermi_surface_factor_J(disp, dom, mu)
    return J / 12.0 * (1 + alpha) / (2 * alpha) * math.log(mu / T)
