"""The four NDE quality models and the transitions between them.

Model (1) ``BaseModel``      continuous signal S given continuous condition X
Model (2) ``PodCurve``       binary indication I given continuous X
Model (3) ``RocModel``       continuous S given binary Y = 1{X > x_th}
Model (4) ``ConfusionMatrix`` binary I given binary Y

Derived objects keep closures over their parent model rather than tables.
All signal-side callables are vectorized over numpy arrays.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .distributions import ContinuousDistribution, Lognormal, effective_support
from .errors import DegenerateDesign
from .quadrature import (
    DEFAULT_SETTINGS,
    Interval,
    QuadSettings,
    _variable_map,
    integrate,
    minimize_scalar,
)

# F_exp(x_th) outside [DEGENERATE_TOL, 1 - DEGENERATE_TOL] is degenerate.
DEGENERATE_TOL = 1e-12

Array = np.ndarray


class SignalOrientation(enum.Enum):
    """Which side of the signal threshold counts as a detection (I = 1)."""

    ABOVE = "above"
    BELOW = "below"

    def detected(self, s, s_th):
        s = np.asarray(s)
        return s > s_th if self is SignalOrientation.ABOVE else s < s_th


@dataclass(frozen=True, eq=False)
class BaseModel:
    """Conditional signal family ``S | X = x``.

    ``cond_signal_dist`` maps an array of conditions to a distribution with
    array parameters, so ``base.pdf(s, x)`` broadcasts like numpy does.
    """

    cond_signal_dist: Callable[[Array], ContinuousDistribution]
    signal_support: Interval
    condition_support: Interval
    spec: Optional[dict] = None

    def pdf(self, s, x):
        return self.cond_signal_dist(np.asarray(x, dtype=float)).pdf(s)

    def logpdf(self, s, x):
        return self.cond_signal_dist(np.asarray(x, dtype=float)).logpdf(s)

    def cdf(self, s, x):
        return self.cond_signal_dist(np.asarray(x, dtype=float)).cdf(s)

    def sf(self, s, x):
        return self.cond_signal_dist(np.asarray(x, dtype=float)).sf(s)


def lognormal_polynomial_base(coefficients, sigma_log: float) -> BaseModel:
    """Lognormal signal whose median is a polynomial in the condition.

    ``coefficients`` are highest degree first (``numpy.polyval`` order). The
    polynomial must be positive on ``[0, inf)``.
    """
    coeffs = np.asarray(coefficients, dtype=float)
    if np.polyval(coeffs, 0.0) <= 0 or np.any(coeffs < 0):
        raise ValueError("median polynomial must have non-negative coefficients and positive value at 0")

    def family(x):
        return Lognormal(np.log(np.polyval(coeffs, x)), sigma_log)

    return BaseModel(
        cond_signal_dist=family,
        signal_support=Interval(0.0, math.inf),
        condition_support=Interval(0.0, math.inf),
        spec={"kind": "lognormal_polynomial", "median_coefficients": coeffs.tolist(), "sigma_log": float(sigma_log)},
    )


@dataclass(frozen=True, eq=False)
class PodCurve:
    pod: Callable[[Array], Array]
    s_th: float = math.nan
    orientation: SignalOrientation = SignalOrientation.ABOVE
    provenance: Optional[BaseModel] = None

    def __call__(self, x):
        return self.pod(np.asarray(x, dtype=float))

    def tabulate(self, xs) -> list[tuple[float, float]]:
        xs = np.asarray(xs, dtype=float)
        return list(zip(xs.tolist(), np.asarray(self(xs), dtype=float).tolist()))


@dataclass(frozen=True)
class ConfusionMatrix:
    pod: float
    pfa: float

    def __post_init__(self):
        for name in ("pod", "pfa"):
            v = float(getattr(self, name))
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
            object.__setattr__(self, name, v)

    def table(self) -> Array:
        """``Pr(I = i | Y = y)`` indexed ``[i, y]``; columns sum to 1."""
        return np.array([[1.0 - self.pfa, 1.0 - self.pod], [self.pfa, self.pod]])

    def likelihood(self, i: int) -> tuple[float, float]:
        """``(L(Y=0; i), L(Y=1; i))``."""
        row = self.table()[int(i)]
        return float(row[0]), float(row[1])


@dataclass(frozen=True, eq=False)
class RocProvenance:
    base: BaseModel
    x_th: float
    exp_design: ContinuousDistribution


@dataclass(frozen=True, eq=False)
class RocModel:
    """Pair of conditional signal densities plus ``Pr(Y = 1)``.

    ``cdf_y0``/``cdf_y1`` (``P(S <= s | Y)``) and ``loglik_*`` are optional
    fast paths; when absent, masses come from integrating the densities.
    ``provenance`` is None for a ROC model given directly.
    """

    lik_y0: Callable[[Array], Array]
    lik_y1: Callable[[Array], Array]
    prior_y1: float
    orientation: SignalOrientation
    signal_support: Interval
    provenance: Optional[RocProvenance] = None
    cdf_y0: Optional[Callable[[Array], Array]] = None
    cdf_y1: Optional[Callable[[Array], Array]] = None
    loglik_y0: Optional[Callable[[Array], Array]] = None
    loglik_y1: Optional[Callable[[Array], Array]] = None
    dists: Optional[tuple] = field(default=None, repr=False)

    def __post_init__(self):
        if not 0.0 <= self.prior_y1 <= 1.0:
            raise ValueError("prior_y1 outside [0, 1]")

    def log_likelihoods(self, s) -> tuple[Array, Array]:
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore"):
            l0 = self.loglik_y0(s) if self.loglik_y0 else np.log(self.lik_y0(s))
            l1 = self.loglik_y1(s) if self.loglik_y1 else np.log(self.lik_y1(s))
        return l0, l1

    def log_likelihood_ratio(self, s) -> Array:
        l0, l1 = self.log_likelihoods(s)
        with np.errstate(invalid="ignore"):
            return l1 - l0

    def with_prior(self, prior_y1: float) -> "RocModel":
        return dataclasses.replace(self, prior_y1=float(prior_y1))


def roc_given(
    dist_y0: ContinuousDistribution,
    dist_y1: ContinuousDistribution,
    prior_y1: float,
    orientation: SignalOrientation,
) -> RocModel:
    """ROC model specified directly by the two signal distributions."""
    lo = min(dist_y0.support.lo, dist_y1.support.lo)
    hi = max(dist_y0.support.hi, dist_y1.support.hi)
    return RocModel(
        lik_y0=dist_y0.pdf,
        lik_y1=dist_y1.pdf,
        prior_y1=float(prior_y1),
        orientation=orientation,
        signal_support=Interval(lo, hi),
        cdf_y0=dist_y0.cdf,
        cdf_y1=dist_y1.cdf,
        loglik_y0=dist_y0.logpdf,
        loglik_y1=dist_y1.logpdf,
        dists=(dist_y0, dist_y1),
    )


def pod_curve_from_base(
    base: BaseModel, s_th: float, orientation: SignalOrientation = SignalOrientation.ABOVE
) -> PodCurve:
    if orientation is SignalOrientation.ABOVE:
        def pod(x):
            return base.sf(s_th, x)
    else:
        def pod(x):
            return base.cdf(s_th, x)
    return PodCurve(pod=pod, s_th=float(s_th), orientation=orientation, provenance=base)


def _split_design(design: ContinuousDistribution, x_th: float) -> tuple[float, Interval, Interval]:
    f_th = float(design.cdf(x_th))
    if not DEGENERATE_TOL <= f_th <= 1.0 - DEGENERATE_TOL:
        raise DegenerateDesign(f"F_exp(x_th={x_th}) = {f_th:.3g} leaves one class (numerically) empty")
    dom = effective_support(design)
    if not dom.lo < x_th < dom.hi:
        raise DegenerateDesign(f"x_th={x_th} outside the design's effective support")
    return f_th, Interval(dom.lo, x_th), Interval(x_th, dom.hi)


def _class_average(base_fn, design, region: Interval, mass: float, settings: QuadSettings):
    """s -> E_design[base_fn(s, X) | X in region], vectorized over s."""

    def avg(s):
        s = np.asarray(s, dtype=float)
        flat = np.atleast_1d(s).ravel()

        def integrand(x):
            return base_fn(flat[None, :], x[:, None]) * design.pdf(x)[:, None]

        out = integrate(integrand, region, settings) / mass
        return np.asarray(out).reshape(s.shape)

    return avg


def roc_from_base(
    base: BaseModel,
    x_th: float,
    exp_design: ContinuousDistribution,
    app_prior: ContinuousDistribution,
    orientation: SignalOrientation = SignalOrientation.ABOVE,
    settings: QuadSettings = DEFAULT_SETTINGS,
) -> RocModel:
    """Model (3) from Model (1) under an experimental design.

    The class-conditional densities average the base model over the design
    restricted to each side of ``x_th``; ``Pr(Y = 1)`` comes from the
    application prior.
    """
    f_th, lower, upper = _split_design(exp_design, x_th)
    return RocModel(
        lik_y0=_class_average(base.pdf, exp_design, lower, f_th, settings),
        lik_y1=_class_average(base.pdf, exp_design, upper, 1.0 - f_th, settings),
        prior_y1=float(app_prior.sf(x_th)),
        orientation=orientation,
        signal_support=base.signal_support,
        provenance=RocProvenance(base, float(x_th), exp_design),
        cdf_y0=_class_average(base.cdf, exp_design, lower, f_th, settings),
        cdf_y1=_class_average(base.cdf, exp_design, upper, 1.0 - f_th, settings),
    )


def detection_masses(roc: RocModel, s_th) -> tuple[Array, Array]:
    """Vectorized ``(pfa, pod)`` from the class cdfs."""
    s_th = np.asarray(s_th, dtype=float)
    c0, c1 = roc.cdf_y0(s_th), roc.cdf_y1(s_th)
    if roc.orientation is SignalOrientation.ABOVE:
        return 1.0 - c0, 1.0 - c1
    return c0, c1


def _density_mass(lik, roc: RocModel, s_th: float, settings: QuadSettings) -> float:
    sup = roc.signal_support
    if roc.orientation is SignalOrientation.ABOVE:
        lo, hi = max(s_th, sup.lo), sup.hi
    else:
        lo, hi = sup.lo, min(s_th, sup.hi)
    if not lo < hi:
        return 0.0
    return float(integrate(lik, Interval(lo, hi), settings))


def roc_point(
    roc: RocModel, s_th: float, method: str = "auto", settings: QuadSettings = DEFAULT_SETTINGS
) -> ConfusionMatrix:
    """Operating point at ``s_th``.

    ``method="density"`` integrates the class densities over the detection
    side; ``"auto"`` uses the class cdfs when the model carries them.
    """
    if method == "auto" and roc.cdf_y0 is not None and roc.cdf_y1 is not None:
        pfa, pod = detection_masses(roc, s_th)
    elif method in ("auto", "density"):
        pfa = _density_mass(roc.lik_y0, roc, s_th, settings)
        pod = _density_mass(roc.lik_y1, roc, s_th, settings)
    else:
        raise ValueError(f"unknown method {method!r}")
    return ConfusionMatrix(pod=float(np.clip(pod, 0, 1)), pfa=float(np.clip(pfa, 0, 1)))


def confusion_from_pod_curve(
    pod_curve: PodCurve,
    x_th: float,
    exp_design: ContinuousDistribution,
    settings: QuadSettings = DEFAULT_SETTINGS,
) -> ConfusionMatrix:
    f_th, lower, upper = _split_design(exp_design, x_th)

    def integrand(x):
        return pod_curve(x) * exp_design.pdf(x)

    pod = integrate(integrand, upper, settings) / (1.0 - f_th)
    pfa = integrate(integrand, lower, settings) / f_th
    return ConfusionMatrix(pod=float(np.clip(pod, 0, 1)), pfa=float(np.clip(pfa, 0, 1)))


def _mass_cdfs(roc: RocModel):
    if roc.cdf_y0 is not None and roc.cdf_y1 is not None:
        return roc.cdf_y0, roc.cdf_y1

    def make(lik):
        def cdf(s):
            s = np.atleast_1d(np.asarray(s, dtype=float))
            return np.array([
                0.0 if x <= roc.signal_support.lo else integrate(lik, Interval(roc.signal_support.lo, x))
                for x in s
            ])
        return cdf

    return make(roc.lik_y0), make(roc.lik_y1)


def _candidate_signals(roc: RocModel, n: int = 4001) -> Array:
    t_lo, t_hi, x_of_t, _, _ = _variable_map(roc.signal_support)
    t = np.linspace(t_lo, t_hi, n + 2)[1:-1]
    with np.errstate(divide="ignore", over="ignore"):
        return x_of_t(t)


def roc_curve_trace(roc: RocModel, n: int = 201, eps: float = 1e-9) -> list[tuple[float, float, float]]:
    """``(s_th, pfa, pod)`` rows from (near) (0, 0) to (near) (1, 1).

    Thresholds are placed at quantiles of the equal-weight mixture of the two
    classes, so points spread evenly along the curve.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    cdf0, cdf1 = _mass_cdfs(roc)
    cand = _candidate_signals(roc)
    mix = 0.5 * (np.asarray(cdf0(cand)) + np.asarray(cdf1(cand)))
    mix = np.maximum.accumulate(mix)
    keep = np.concatenate([[True], np.diff(mix) > 0])
    levels = np.linspace(eps, 1.0 - eps, n)
    s = np.interp(levels, mix[keep], cand[keep])
    c0, c1 = np.asarray(cdf0(s)), np.asarray(cdf1(s))
    if roc.orientation is SignalOrientation.ABOVE:
        pfa, pod = 1.0 - c0, 1.0 - c1
        order = np.argsort(-s, kind="stable")
    else:
        pfa, pod = c0, c1
        order = np.argsort(s, kind="stable")
    pfa = np.maximum.accumulate(np.clip(pfa[order], 0, 1))
    pod = np.maximum.accumulate(np.clip(pod[order], 0, 1))
    return list(zip(s[order].tolist(), pfa.tolist(), pod.tolist()))


@dataclass(frozen=True)
class RocIndices:
    auc: float
    youden: tuple[float, float]
    closest_to_corner: tuple[float, float]


def roc_indices(roc: RocModel, n: int = 401) -> RocIndices:
    trace = roc_curve_trace(roc, n)
    s, pfa, pod = (np.array(c) for c in zip(*trace))
    xs = np.concatenate([[0.0], pfa, [1.0]])
    ys = np.concatenate([[0.0], pod, [1.0]])
    auc = float(np.trapezoid(ys, xs))

    cdf0, cdf1 = _mass_cdfs(roc)

    def point(st):
        c0, c1 = np.asarray(cdf0(st)), np.asarray(cdf1(st))
        if roc.orientation is SignalOrientation.ABOVE:
            return 1.0 - c0, 1.0 - c1
        return c0, c1

    def neg_youden(st):
        fa, d = point(st)
        return -(d - fa)

    def corner(st):
        fa, d = point(st)
        return np.sqrt(fa * fa + (1.0 - d) ** 2)

    # search between the thresholds where the curve leaves (0,0) and reaches (1,1)
    inner = (pfa > 1e-6) | (pod > 1e-6)
    inner &= (pfa < 1 - 1e-6) | (pod < 1 - 1e-6)
    lo, hi = float(np.min(s[inner])), float(np.max(s[inner]))
    scale = "log" if roc.signal_support.lo >= 0 and lo > 0 else "linear"
    bracket = Interval(lo, hi)
    ys_arg, ys_val = minimize_scalar(neg_youden, bracket, 401, scale=scale, vectorized=True)
    cc_arg, cc_val = minimize_scalar(corner, bracket, 401, scale=scale, vectorized=True)
    return RocIndices(auc=auc, youden=(ys_arg, -ys_val), closest_to_corner=(cc_arg, cc_val))
