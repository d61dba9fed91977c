"""Run configuration: YAML parsing, validation and conversion to model objects.

Example::

    dispersion: {kind: ideal-gas, d: 1, mass: 1.0, hbar: 1.0}
    thermo: {mode: mu, value: 1.0}
    domain: {kind: intervals, intervals: [[0, 1]]}
    alpha: [1, 2]
    temperatures: {start: 0.01, stop: 1.0, num: 10, spacing: log}
    L_grid: [20, 40, 80, 160]
    tol: 1.0e-8
    seed: 0
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .boundary import Domain
from .errors import ConfigError, UnsupportedConfigurationError
from .thermodynamics import Dispersion, IdealGas, PowerLaw, TabulatedIsotropic, ThermoPoint

DISPERSION_KINDS = ("ideal-gas", "power-law", "tabulated", "anisotropic-ideal-gas")


@dataclass(frozen=True)
class DispersionSpec:
    kind: str = "ideal-gas"
    d: int = 1
    hbar: float = 1.0
    mass: float = 1.0
    masses: tuple = ()
    c: float = 0.5
    gamma: float = 2.0
    p: tuple = ()
    eps: tuple = ()

    def validate(self):
        if self.kind not in DISPERSION_KINDS:
            raise ConfigError(f"dispersion.kind must be one of {DISPERSION_KINDS}, got {self.kind!r}")
        if not (isinstance(self.d, int) and self.d >= 1):
            raise ConfigError("dispersion.d must be a positive integer")
        _positive("dispersion.hbar", self.hbar)
        if self.kind == "ideal-gas":
            _positive("dispersion.mass", self.mass)
        elif self.kind == "power-law":
            _positive("dispersion.c", self.c)
            _positive("dispersion.gamma", self.gamma)
        elif self.kind == "tabulated":
            if len(self.p) < 4 or len(self.p) != len(self.eps):
                raise ConfigError("tabulated dispersion needs matching p and eps lists of length >= 4")
        else:
            if len(self.masses) != self.d:
                raise ConfigError("anisotropic-ideal-gas needs one mass per dimension")
            for m in self.masses:
                _positive("dispersion.masses", m)
            if self.d >= 2 and len(set(self.masses)) > 1:
                raise UnsupportedConfigurationError(
                    "unsupported-configuration: anisotropic dispersions are only supported in d = 1"
                )

    def build(self) -> Dispersion:
        if self.kind == "ideal-gas":
            return IdealGas(d=self.d, hbar=self.hbar, mass=self.mass)
        if self.kind == "anisotropic-ideal-gas":
            return IdealGas(d=self.d, hbar=self.hbar, mass=float(self.masses[0]))
        if self.kind == "power-law":
            return PowerLaw(d=self.d, hbar=self.hbar, c=self.c, gamma=self.gamma)
        return TabulatedIsotropic(d=self.d, hbar=self.hbar, p=tuple(self.p), eps=tuple(self.eps))


@dataclass(frozen=True)
class ThermoSpec:
    mode: str = "mu"
    value: float = 1.0

    def validate(self):
        if self.mode not in ("mu", "rho"):
            raise ConfigError("thermo.mode must be 'mu' or 'rho'")
        if not math.isfinite(self.value):
            raise ConfigError("thermo.value must be finite")
        if self.mode == "rho":
            _positive("thermo.value", self.value)

    def point(self, disp: Dispersion, T: float, tol: float = 1e-12) -> ThermoPoint:
        if self.mode == "mu":
            return ThermoPoint.fixed_mu(T, self.value)
        return ThermoPoint.fixed_rho(disp, T, self.value, tol)


@dataclass(frozen=True)
class DomainSpec:
    kind: str = "intervals"
    intervals: tuple = ((0.0, 1.0),)
    radius: float = 1.0
    edges: tuple = ()

    def build(self, d: int) -> Domain:
        try:
            if self.kind == "intervals":
                if d != 1:
                    raise ConfigError("interval domains need d = 1")
                return Domain.intervals(*[tuple(iv) for iv in self.intervals])
            if self.kind == "ball":
                return Domain.ball(self.radius, d)
            if self.kind == "box":
                if len(self.edges) != d:
                    raise ConfigError("domain.edges needs d entries")
                return Domain.box(*self.edges)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid domain: {exc}") from exc
        raise ConfigError(f"domain.kind must be intervals, ball or box, got {self.kind!r}")


@dataclass(frozen=True)
class RunConfig:
    dispersion: DispersionSpec = field(default_factory=DispersionSpec)
    thermo: ThermoSpec = field(default_factory=ThermoSpec)
    domain: DomainSpec = field(default_factory=DomainSpec)
    alpha: tuple = (1.0,)
    temperatures: tuple = (0.1,)
    L_grid: tuple = (20.0, 40.0, 80.0, 160.0)
    tol: float = 1e-8
    seed: int = 0
    out: str = "out"

    def validate(self) -> "RunConfig":
        self.dispersion.validate()
        self.thermo.validate()
        self.domain.build(self.dispersion.d)
        if not self.alpha:
            raise ConfigError("alpha list is empty")
        for a in self.alpha:
            _positive("alpha", a)
        if not self.temperatures:
            raise ConfigError("temperature grid is empty")
        for T in self.temperatures:
            _positive("temperatures", T)
        for L in self.L_grid:
            if not L >= 1:
                raise ConfigError("L_grid entries must be >= 1")
        _positive("tol", self.tol)
        return self

    def build_dispersion(self) -> Dispersion:
        return self.dispersion.build()

    def build_domain(self) -> Domain:
        return self.domain.build(self.dispersion.d)

    def to_dict(self) -> dict:
        d = asdict(self)
        return _plain(d)


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def _positive(name, value):
    try:
        ok = float(value) > 0 and math.isfinite(float(value))
    except (TypeError, ValueError):
        ok = False
    if not ok:
        raise ConfigError(f"{name} must be a positive finite number, got {value!r}")


def _tuple(v):
    if isinstance(v, (list, tuple)):
        return tuple(_tuple(x) for x in v)
    return v


def _grid(spec) -> tuple:
    if isinstance(spec, (int, float)):
        return (float(spec),)
    if isinstance(spec, (list, tuple)):
        return tuple(float(x) for x in spec)
    if isinstance(spec, dict):
        try:
            start, stop, num = float(spec["start"]), float(spec["stop"]), int(spec["num"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("grid needs start, stop, num") from exc
        spacing = spec.get("spacing", "log")
        if spacing == "log":
            if start <= 0 or stop <= 0:
                raise ConfigError("log grid needs positive bounds")
            return tuple(float(x) for x in np.geomspace(start, stop, num))
        if spacing == "linear":
            return tuple(float(x) for x in np.linspace(start, stop, num))
        raise ConfigError("grid spacing must be 'log' or 'linear'")
    raise ConfigError(f"cannot parse grid {spec!r}")


def _section(cls, data, name):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f"{name} must be a mapping")
    known = set(cls.__dataclass_fields__)
    extra = set(data) - known
    if extra:
        raise ConfigError(f"unknown keys in {name}: {sorted(extra)}")
    return cls(**{k: _tuple(v) for k, v in data.items()})


def config_from_dict(data: dict) -> RunConfig:
    """Build and validate a RunConfig from a plain mapping."""
    if not isinstance(data, dict):
        raise ConfigError("configuration root must be a mapping")
    known = set(RunConfig.__dataclass_fields__)
    extra = set(data) - known
    if extra:
        raise ConfigError(f"unknown top-level keys: {sorted(extra)}")
    try:
        kw = {}
        if "alpha" in data:
            kw["alpha"] = _grid(data["alpha"])
        if "temperatures" in data:
            kw["temperatures"] = _grid(data["temperatures"])
        if "L_grid" in data:
            kw["L_grid"] = _grid(data["L_grid"])
        for key, conv in (("tol", float), ("seed", int), ("out", str)):
            if key in data:
                kw[key] = conv(data[key])
        cfg = RunConfig(
            dispersion=_section(DispersionSpec, data.get("dispersion"), "dispersion"),
            thermo=_section(ThermoSpec, data.get("thermo"), "thermo"),
            domain=_section(DomainSpec, data.get("domain"), "domain"),
            **kw,
        )
    except TypeError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc
    return cfg.validate()


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    return config_from_dict(data)
