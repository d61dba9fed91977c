"""Least-squares fitters for asymptotic series: power laws, log laws, two-term scaling."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import IllConditionedFitError

MAX_CONDITION = 1e10


@dataclass(frozen=True)
class SampleSeries:
    """Ordered samples (x, y) with x > 0 strictly increasing and at least 3 points."""

    x: tuple
    y: tuple
    tag: str = ""

    def __post_init__(self):
        x = tuple(float(v) for v in self.x)
        y = tuple(float(v) for v in self.y)
        if len(x) != len(y):
            raise ValueError("x and y lengths differ")
        if len(x) < 3:
            raise ValueError("need at least 3 samples")
        if min(x) <= 0:
            raise ValueError("abscissae must be positive")
        if any(b <= a for a, b in zip(x, x[1:])):
            raise ValueError("abscissae must be strictly increasing")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_unsorted(cls, x, y, tag: str = "") -> "SampleSeries":
        order = np.argsort(np.asarray(x, dtype=float))
        return cls(tuple(np.asarray(x, float)[order]), tuple(np.asarray(y, float)[order]), tag)

    @property
    def xs(self) -> np.ndarray:
        return np.asarray(self.x)

    @property
    def ys(self) -> np.ndarray:
        return np.asarray(self.y)


@dataclass(frozen=True)
class ScalingFit:
    """Coefficients of a linear model with standard errors and diagnostics."""

    model: str
    names: tuple
    coefficients: tuple
    stderr: tuple
    residual_norm: float
    condition: float
    extra: dict = field(default_factory=dict)

    def coefficient(self, name: str) -> float:
        return self.coefficients[self.names.index(name)]

    def as_dict(self) -> dict:
        return {
            "model": self.model,
            "coefficients": dict(zip(self.names, self.coefficients)),
            "stderr": dict(zip(self.names, self.stderr)),
            "residual_norm": self.residual_norm,
            "condition": self.condition,
            **self.extra,
        }


def _lstsq(A: np.ndarray, y: np.ndarray):
    cond = float(np.linalg.cond(A))
    if not math.isfinite(cond) or cond > MAX_CONDITION:
        raise IllConditionedFitError(f"design matrix condition number {cond:.3g} exceeds {MAX_CONDITION:g}")
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    dof = len(y) - A.shape[1]
    if dof > 0:
        sigma2 = float(resid @ resid) / dof
        cov = sigma2 * np.linalg.inv(A.T @ A)
        se = np.sqrt(np.maximum(np.diag(cov), 0.0))
    else:
        se = np.zeros(A.shape[1])
    return coef, se, float(np.linalg.norm(resid)), cond


def fit_power_law(s: SampleSeries):
    """Fit y = c x^k; returns (k, c, stderr of k)."""
    y = s.ys
    if np.any(y <= 0):
        raise ValueError("power-law fit needs strictly positive ordinates")
    A = np.column_stack([np.log(s.xs), np.ones(len(y))])
    coef, se, _, _ = _lstsq(A, np.log(y))
    return float(coef[0]), float(math.exp(coef[1])), float(se[0])


def fit_log_law(s: SampleSeries, pivot: float):
    """Fit y = a ln(pivot/x) + b; returns (a, b, stderr of a)."""
    if not pivot > 0:
        raise ValueError("pivot must be positive")
    A = np.column_stack([np.log(pivot / s.xs), np.ones(len(s.x))])
    coef, se, _, _ = _lstsq(A, s.ys)
    return float(coef[0]), float(coef[1]), float(se[0])


def fit_two_term(s: SampleSeries, d: int, log_term: bool = False) -> ScalingFit:
    """Fit y(L) in the basis {L^d, L^(d-1), 1}.

    For d = 1 the L^0 and constant columns coincide and are merged.  With
    ``log_term`` an extra L^(d-1) ln L column is appended.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    L = s.xs
    if len(L) < 4:
        raise ValueError("two-term fit needs at least 4 points")
    cols = [L**d]
    names = ["bulk"]
    if d == 1:
        cols.append(np.ones_like(L))
        names.append("boundary")
    else:
        cols += [L ** (d - 1), np.ones_like(L)]
        names += ["boundary", "constant"]
    if log_term:
        cols.append(L ** (d - 1) * np.log(L))
        names.append("log")
    A = np.column_stack(cols)
    # scale columns so conditioning reflects the geometry, not units
    scale = np.max(np.abs(A), axis=0)
    coef, se, rn, cond = _lstsq(A / scale, s.ys)
    return ScalingFit("two-term", tuple(names), tuple(map(float, coef / scale)),
                      tuple(map(float, se / scale)), rn, cond)
