"""Posterior inference on the condition and on the critical event F.

A *prior* is either a ``ContinuousDistribution`` over the condition X or a
``BinaryPrior`` over Y in {0, 1}. A *likelihood* is a callable of the
condition already conditioned on the observation, i.e. ``theta -> L(theta; z)``;
use ``functools.partial`` or a closure to fix ``z``. It must accept an array
of conditions and may return extra trailing dimensions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np
from scipy import special

from .distributions import ContinuousDistribution, effective_support
from .errors import ZeroEvidence
from .quadrature import DEFAULT_SETTINGS, Interval, QuadSettings, integrate

MIN_EVIDENCE = 1e-300


class Action(str, enum.Enum):
    DO_NOTHING = "a0"
    REPAIR = "aR"

    def __str__(self) -> str:
        return self.value


A0 = Action.DO_NOTHING
AR = Action.REPAIR
ACTIONS = (A0, AR)


@dataclass(frozen=True)
class BinaryPrior:
    p1: float

    def __post_init__(self):
        if not 0.0 <= self.p1 <= 1.0:
            raise ValueError("p1 outside [0, 1]")

    @property
    def weights(self) -> np.ndarray:
        return np.array([1.0 - self.p1, self.p1])


Prior = Union[ContinuousDistribution, BinaryPrior]
BINARY_THETA = np.array([0.0, 1.0])


def expect(
    prior: Prior,
    g: Callable[[np.ndarray], np.ndarray],
    settings: QuadSettings = DEFAULT_SETTINGS,
    *,
    breakpoints: Sequence[float] = (),
):
    """``E_prior[g(theta)]``; ``g`` may return trailing dimensions."""
    if isinstance(prior, BinaryPrior):
        vals = np.asarray(g(BINARY_THETA), dtype=float)
        out = np.tensordot(prior.weights, vals, axes=([0], [0]))
        return float(out) if np.ndim(out) == 0 else out

    def integrand(x):
        vals = np.asarray(g(x), dtype=float)
        w = prior.pdf(x)
        return vals * w.reshape(w.shape + (1,) * (vals.ndim - 1))

    return integrate(integrand, effective_support(prior), settings, breakpoints=breakpoints)


@dataclass(frozen=True, eq=False)
class FailureModel:
    """``Pr(F | theta, a)`` for each action.

    For binary conditions ``table[a] = (Pr(F|Y=0,a), Pr(F|Y=1,a))``.
    """

    p_fail: Mapping[Action, Callable[[np.ndarray], np.ndarray]]
    table: Optional[Mapping[Action, tuple[float, float]]] = None
    breakpoints: tuple[float, ...] = ()

    def __call__(self, theta, action: Action):
        return np.asarray(self.p_fail[Action(action)](np.asarray(theta, dtype=float)), dtype=float)

    @classmethod
    def binary(cls, table: Mapping[Action, Sequence[float]]) -> "FailureModel":
        clean = {}
        for a in ACTIONS:
            p0, p1 = (float(v) for v in table[a])
            if not (0 <= p0 <= 1 and 0 <= p1 <= 1):
                raise ValueError(f"failure probabilities for {a} outside [0, 1]")
            clean[a] = (p0, p1)

        def lookup(pair):
            return lambda y: np.where(np.asarray(y) > 0.5, pair[1], pair[0])

        return cls({a: lookup(clean[a]) for a in ACTIONS}, table=clean)

    @property
    def is_binary(self) -> bool:
        return self.table is not None


def lognormal_cdf_failure(floor: float, mu_log: float, sigma_log: float, p_fail_repaired: float) -> FailureModel:
    """Do-nothing failure probability ``floor + (1 - floor) * Phi((ln x - mu_log) / sigma_log)``.

    Repair gives a constant ``p_fail_repaired``.
    """

    def p0(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            lx = np.where(x > 0, np.log(np.where(x > 0, x, 1.0)), -np.inf)
        return floor + (1.0 - floor) * special.ndtr((lx - mu_log) / sigma_log)

    def pr(x):
        return np.full(np.shape(x), float(p_fail_repaired))

    return FailureModel({A0: p0, AR: pr})


@dataclass(frozen=True, eq=False)
class Posterior:
    prior: Prior
    likelihood: Callable[[np.ndarray], np.ndarray]
    evidence: float

    @property
    def p1(self) -> float:
        if not isinstance(self.prior, BinaryPrior):
            raise TypeError("p1 is defined for binary conditions only")
        return float(self.prior.p1 * np.asarray(self.likelihood(BINARY_THETA))[1] / self.evidence)

    def density(self, theta):
        """Normalized posterior density (continuous) or mass (binary)."""
        theta = np.asarray(theta, dtype=float)
        if isinstance(self.prior, BinaryPrior):
            w = np.where(theta > 0.5, self.prior.p1, 1.0 - self.prior.p1)
        else:
            w = self.prior.pdf(theta)
        return np.asarray(self.likelihood(theta)) * w / self.evidence

    def total_mass(self, settings: QuadSettings = DEFAULT_SETTINGS) -> float:
        if isinstance(self.prior, BinaryPrior):
            return float(np.sum(self.density(BINARY_THETA)))
        return float(integrate(self.density, effective_support(self.prior), settings))


def evidence(prior: Prior, likelihood, settings: QuadSettings = DEFAULT_SETTINGS) -> float:
    """Marginal probability (or density) of the observation."""
    val = float(expect(prior, likelihood, settings))
    if not val >= MIN_EVIDENCE:
        raise ZeroEvidence(f"evidence {val:.3g} below {MIN_EVIDENCE}")
    return val


def posterior(prior: Prior, likelihood, settings: QuadSettings = DEFAULT_SETTINGS) -> Posterior:
    return Posterior(prior, likelihood, evidence(prior, likelihood, settings))


def posterior_failure(
    prior: Prior,
    likelihood,
    fm: FailureModel,
    action: Action,
    settings: QuadSettings = DEFAULT_SETTINGS,
) -> float:
    """``Pr(F | z, a)``; pass ``likelihood=lambda t: np.ones_like(t)`` for the prior value."""
    ev = evidence(prior, likelihood, settings)

    def joint(theta):
        return fm(theta, action) * np.asarray(likelihood(theta))

    return float(expect(prior, joint, settings, breakpoints=fm.breakpoints)) / ev


def binary_compatibility(
    prior: ContinuousDistribution,
    fm: FailureModel,
    x_th: float,
    settings: QuadSettings = DEFAULT_SETTINGS,
) -> tuple[float, FailureModel]:
    """``Pr(Y = 1)`` and the binary failure table implied by a continuous model.

    ``Pr(F | Y = y, a)`` is the prior average of ``Pr(F | x, a)`` over the side
    of ``x_th`` that defines ``y``.
    """
    dom = effective_support(prior)
    p1 = float(prior.sf(x_th))
    if not 0.0 < p1 < 1.0 or not dom.lo < x_th < dom.hi:
        raise ValueError(f"x_th={x_th} leaves a class with zero prior mass")
    table = {}
    for a in ACTIONS:
        def g(x, a=a):
            return fm(x, a) * prior.pdf(x)

        upper = integrate(g, Interval(x_th, dom.hi), settings) / p1
        lower = integrate(g, Interval(dom.lo, x_th), settings) / (1.0 - p1)
        table[a] = (min(max(lower, 0.0), 1.0), min(max(upper, 0.0), 1.0))
    return p1, FailureModel.binary(table)


def log_expect_binary(prior: BinaryPrior, log_terms: np.ndarray) -> np.ndarray:
    """``log E[exp(log_terms)]`` over Y for ``log_terms`` indexed ``[y, ...]``."""
    with np.errstate(divide="ignore"):
        lw = np.log(prior.weights)
    lw = lw.reshape((2,) + (1,) * (np.ndim(log_terms) - 1))
    t = np.asarray(log_terms) + lw
    return np.logaddexp(t[0], t[1])


__all__ = [
    "A0",
    "AR",
    "ACTIONS",
    "Action",
    "BinaryPrior",
    "FailureModel",
    "Posterior",
    "binary_compatibility",
    "evidence",
    "expect",
    "lognormal_cdf_failure",
    "posterior",
    "posterior_failure",
]
