"""Univariate continuous distributions.

Parameters may be numpy arrays; evaluation then broadcasts, which is how the
base model produces a whole family ``S | X = x`` for a vector of ``x`` in one
object. Distributions serialize to ``{"kind": ..., <params>}`` records.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import special

from .quadrature import Interval

__all__ = [
    "Exponential",
    "Lognormal",
    "Normal",
    "Uniform",
    "ContinuousDistribution",
    "from_dict",
    "effective_support",
]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _arr(x):
    return np.asarray(x, dtype=float)


class _Base:
    support: Interval

    def pdf(self, x):
        with np.errstate(divide="ignore", under="ignore"):
            return np.exp(self.logpdf(x))

    def sf(self, x):
        return 1.0 - self.cdf(x)

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Exponential(_Base):
    mean: float

    def __post_init__(self):
        if np.any(_arr(self.mean) <= 0):
            raise ValueError("exponential mean must be positive")

    @property
    def support(self) -> Interval:
        return Interval(0.0, math.inf)

    def logpdf(self, x):
        x = _arr(x)
        m = _arr(self.mean)
        with np.errstate(divide="ignore"):
            return np.where(x >= 0, -x / m - np.log(m), -np.inf)

    def cdf(self, x):
        x = _arr(x)
        return np.where(x > 0, -np.expm1(-np.maximum(x, 0) / _arr(self.mean)), 0.0)

    def sf(self, x):
        x = _arr(x)
        return np.where(x > 0, np.exp(-np.maximum(x, 0) / _arr(self.mean)), 1.0)

    def quantile(self, p):
        return -_arr(self.mean) * np.log1p(-_arr(p))

    def isf(self, q):
        with np.errstate(divide="ignore"):
            return -_arr(self.mean) * np.log(_arr(q))

    def to_dict(self) -> dict:
        return {"kind": "exponential", "mean": float(self.mean)}


@dataclass(frozen=True, eq=False)
class Normal(_Base):
    mu: float
    sigma: float

    def __post_init__(self):
        if np.any(_arr(self.sigma) <= 0):
            raise ValueError("normal sigma must be positive")

    @property
    def support(self) -> Interval:
        return Interval(-math.inf, math.inf)

    def logpdf(self, x):
        z = (_arr(x) - self.mu) / self.sigma
        return -0.5 * z * z - np.log(self.sigma) - _LOG_SQRT_2PI

    def cdf(self, x):
        return special.ndtr((_arr(x) - self.mu) / self.sigma)

    def sf(self, x):
        return special.ndtr((self.mu - _arr(x)) / self.sigma)

    def logcdf(self, x):
        return special.log_ndtr((_arr(x) - self.mu) / self.sigma)

    def quantile(self, p):
        return self.mu + self.sigma * special.ndtri(_arr(p))

    def isf(self, q):
        return self.mu - self.sigma * special.ndtri(_arr(q))

    def to_dict(self) -> dict:
        return {"kind": "normal", "mu": float(self.mu), "sigma": float(self.sigma)}


@dataclass(frozen=True, eq=False)
class Lognormal(_Base):
    """Lognormal given the mean and standard deviation of ``log X``."""

    mu_log: float
    sigma_log: float

    def __post_init__(self):
        if np.any(_arr(self.sigma_log) <= 0):
            raise ValueError("lognormal sigma_log must be positive")

    @property
    def support(self) -> Interval:
        return Interval(0.0, math.inf)

    def logpdf(self, x):
        x = _arr(x)
        pos = x > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            lx = np.log(np.where(pos, x, 1.0))
            z = (lx - self.mu_log) / self.sigma_log
            out = -0.5 * z * z - lx - np.log(self.sigma_log) - _LOG_SQRT_2PI
        return np.where(pos, out, -np.inf)

    def _z(self, x):
        x = _arr(x)
        with np.errstate(divide="ignore"):
            lx = np.where(x > 0, np.log(np.where(x > 0, x, 1.0)), -np.inf)
        return (lx - self.mu_log) / self.sigma_log

    def cdf(self, x):
        return special.ndtr(self._z(x))

    def sf(self, x):
        return special.ndtr(-self._z(x))

    def quantile(self, p):
        return np.exp(self.mu_log + self.sigma_log * special.ndtri(_arr(p)))

    def isf(self, q):
        return np.exp(self.mu_log - self.sigma_log * special.ndtri(_arr(q)))

    def to_dict(self) -> dict:
        return {"kind": "lognormal", "mu_log": float(self.mu_log), "sigma_log": float(self.sigma_log)}


@dataclass(frozen=True, eq=False)
class Uniform(_Base):
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("uniform requires lo < hi")

    @property
    def support(self) -> Interval:
        return Interval(self.lo, self.hi)

    def logpdf(self, x):
        x = _arr(x)
        inside = (x >= self.lo) & (x <= self.hi)
        return np.where(inside, -math.log(self.hi - self.lo), -np.inf)

    def cdf(self, x):
        return np.clip((_arr(x) - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    def quantile(self, p):
        return self.lo + _arr(p) * (self.hi - self.lo)

    def isf(self, q):
        return self.hi - _arr(q) * (self.hi - self.lo)

    def to_dict(self) -> dict:
        return {"kind": "uniform", "lo": float(self.lo), "hi": float(self.hi)}


ContinuousDistribution = Union[Exponential, Lognormal, Normal, Uniform]

_KINDS = {
    "exponential": (Exponential, ("mean",)),
    "lognormal": (Lognormal, ("mu_log", "sigma_log")),
    "normal": (Normal, ("mu", "sigma")),
    "uniform": (Uniform, ("lo", "hi")),
}


def from_dict(record: dict) -> ContinuousDistribution:
    """Inverse of ``to_dict``. Raises KeyError/ValueError on bad records."""
    kind = record.get("kind")
    if kind not in _KINDS:
        raise ValueError(f"unknown distribution kind {kind!r}")
    cls, names = _KINDS[kind]
    missing = [n for n in names if n not in record]
    if missing:
        raise KeyError(f"distribution {kind!r} missing parameter(s) {missing}")
    return cls(*(float(record[n]) for n in names))


def effective_support(dist: ContinuousDistribution, eps: float = 1e-12) -> Interval:
    """Support truncated to the [eps, 1 - eps] quantile range where infinite."""
    lo, hi = dist.support.lo, dist.support.hi
    if not math.isfinite(lo):
        lo = float(dist.quantile(eps))
    if not math.isfinite(hi):
        hi = float(dist.isf(eps))
    return Interval(lo, hi)
