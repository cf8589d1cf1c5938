"""One-step preposterior decision analysis: do nothing (a0) or repair (aR).

For an observation z the decision compares the two *action costs*

    J_a(z) = E_theta[ L(theta; z) * (c_A(a) + c_F * Pr(F | theta, a)) ]

(unnormalized posterior expected costs; dividing by the evidence p(z) does
not change the argmin). Repair is chosen iff J_0(z) > J_R(z), ties go to a0.
The preposterior cost is the integral (or sum) over z of J_{a(z)}(z).
"""

from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np

from .bayes import (
    A0,
    AR,
    ACTIONS,
    BINARY_THETA,
    Action,
    BinaryPrior,
    FailureModel,
    Prior,
    binary_compatibility,
    expect,
    log_expect_binary,
)
from .distributions import ContinuousDistribution
from .errors import ZeroEvidence
from .nde_models import (
    BaseModel,
    ConfusionMatrix,
    PodCurve,
    RocModel,
    SignalOrientation,
    detection_masses,
    pod_curve_from_base,
    roc_from_base,
    roc_point,
)
from .quadrature import (
    DEFAULT_SETTINGS,
    Interval,
    QuadSettings,
    find_roots,
    integrate,
    minimize_scalar,
)

NdeModel = Union[BaseModel, PodCurve, RocModel, ConfusionMatrix]

# outer integral of a nested quadrature; inner results carry ~1e-9 noise
OUTER_SETTINGS = QuadSettings(rel_tol=1e-7, abs_tol=1e-12, max_subdivisions=4000)


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("NDE_VOI_THREADS", "1")))
    except ValueError:
        return 1


def pmap(fn, items, threads: Optional[int] = None) -> list:
    """Order-preserving map, threaded when NDE_VOI_THREADS > 1."""
    items = list(items)
    threads = thread_count() if threads is None else threads
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True, eq=False)
class OneStepProblem:
    """Repair decision informed by one NDE outcome.

    ``root_bracket``/``root_grid``/``root_scale`` configure where repair-zone
    boundaries of a continuous signal are searched; outside the bracket the
    action found at the nearest bracket end is assumed to persist.
    """

    condition_prior: Prior
    nde: Optional[NdeModel]
    failure: FailureModel
    c_R: float
    c_F: float
    nde_cost: float = 0.0
    settings: QuadSettings = DEFAULT_SETTINGS
    root_bracket: Optional[Interval] = None
    root_grid: int = 2001
    root_scale: str = "linear"

    def __post_init__(self):
        if self.c_R < 0 or self.c_F < 0 or self.nde_cost < 0:
            raise ValueError("costs must be non-negative")
        binary_condition = isinstance(self.condition_prior, BinaryPrior)
        if isinstance(self.nde, (RocModel, ConfusionMatrix)) and not binary_condition:
            raise TypeError("ROC / confusion-matrix likelihoods need a binary condition prior")
        if isinstance(self.nde, (BaseModel, PodCurve)) and binary_condition:
            raise TypeError("base-model / PoD-curve likelihoods need a continuous condition prior")
        if binary_condition and not self.failure.is_binary:
            raise TypeError("binary condition requires a binary failure table")

    def with_nde(self, nde: Optional[NdeModel]) -> "OneStepProblem":
        return dataclasses.replace(self, nde=nde)

    @property
    def binary_condition(self) -> bool:
        return isinstance(self.condition_prior, BinaryPrior)

    @property
    def continuous_signal(self) -> bool:
        return isinstance(self.nde, (BaseModel, RocModel))

    def action_weights(self, theta) -> np.ndarray:
        """``c_A(a) + c_F Pr(F | theta, a)``, shape ``(n_theta, 2)`` ordered (a0, aR)."""
        theta = np.asarray(theta, dtype=float)
        return np.stack(
            [self.c_F * self.failure(theta, A0), self.c_R + self.c_F * self.failure(theta, AR)],
            axis=-1,
        )

    def signal_support(self) -> Interval:
        return self.nde.signal_support

    def search_bracket(self) -> Interval:
        if self.root_bracket is not None:
            return self.root_bracket
        sup = self.signal_support()
        if sup.is_finite:
            return sup
        raise ValueError("problem needs root_bracket for an unbounded signal support")


# -- likelihood tables -------------------------------------------------------


def likelihood_table(problem: OneStepProblem, theta, z) -> np.ndarray:
    """``L(theta; z)`` with shape ``(n_theta, n_z)``."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    nde = problem.nde
    if isinstance(nde, BaseModel):
        return nde.pdf(z[None, :], theta[:, None])
    if isinstance(nde, RocModel):
        l0, l1 = nde.lik_y0(z), nde.lik_y1(z)
        return np.where(theta[:, None] > 0.5, l1[None, :], l0[None, :])
    if isinstance(nde, PodCurve):
        pod = np.asarray(nde(theta))[:, None]
        return np.where(z[None, :] > 0.5, pod, 1.0 - pod)
    if isinstance(nde, ConfusionMatrix):
        tab = nde.table()  # [i, y]
        zi = z.astype(int)
        yi = (theta > 0.5).astype(int)
        return tab[zi[None, :], yi[:, None]]
    if nde is None:
        return np.ones((theta.size, z.size))
    raise TypeError(f"unsupported NDE model {type(nde).__name__}")


def action_costs(problem: OneStepProblem, z) -> np.ndarray:
    """``J_a(z)`` with shape ``(n_z, 2)``."""
    z = np.atleast_1d(np.asarray(z, dtype=float))

    def g(theta):
        lik = likelihood_table(problem, theta, z)
        return lik[:, :, None] * problem.action_weights(theta)[:, None, :]

    return np.asarray(expect(problem.condition_prior, g, problem.settings, breakpoints=problem.failure.breakpoints))


def evidence_density(problem: OneStepProblem, z) -> np.ndarray:
    """Marginal probability (binary z) or density (continuous z) of each observation."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    return np.asarray(expect(problem.condition_prior, lambda th: likelihood_table(problem, th, z), problem.settings))


def log_action_costs(problem: OneStepProblem, s) -> np.ndarray:
    """``log J_a(s)``, shape ``(n_s, 2)``; stays finite where densities underflow.

    Uses log-likelihoods when the condition is binary, else ``log`` of
    ``action_costs``.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if isinstance(problem.nde, RocModel):
        l0, l1 = problem.nde.log_likelihoods(s)
        w = problem.action_weights(BINARY_THETA)  # [y, a]
        with np.errstate(divide="ignore"):
            lw = np.log(w)
        terms = np.stack([l0, l1])[:, :, None] + lw[:, None, :]
        return log_expect_binary(problem.condition_prior, terms)
    with np.errstate(divide="ignore"):
        return np.log(action_costs(problem, s))


def repair_margin(problem: OneStepProblem, s) -> np.ndarray:
    """``log J_0(s) - log J_R(s)``: positive where repair is optimal."""
    lj = log_action_costs(problem, s)
    with np.errstate(invalid="ignore"):
        return lj[:, 0] - lj[:, 1]


# -- prior decision ----------------------------------------------------------


def prior_action_costs(problem: OneStepProblem) -> np.ndarray:
    """Expected total cost of (a0, aR) without inspection."""
    return np.asarray(expect(problem.condition_prior, problem.action_weights, problem.settings,
                             breakpoints=problem.failure.breakpoints))


def prior_optimal(problem: OneStepProblem) -> tuple[Action, float]:
    costs = prior_action_costs(problem)
    if costs[0] > costs[1]:
        return AR, float(costs[1])
    return A0, float(costs[0])


# -- likelihood-ratio rule (binary condition) --------------------------------


@dataclass(frozen=True)
class RatioRule:
    """Repair iff ``L(Y=1; z) / L(Y=0; z)`` is above/below ``threshold``.

    ``repair_when`` is ``"above"``, ``"below"``, ``"always"`` or ``"never"``.
    """

    threshold: float
    repair_when: str

    def repair(self, ratio) -> np.ndarray:
        ratio = np.asarray(ratio, dtype=float)
        if self.repair_when == "above":
            return ratio > self.threshold
        if self.repair_when == "below":
            return ratio < self.threshold
        return np.full(ratio.shape, self.repair_when == "always")


def ratio_rule(problem: OneStepProblem) -> RatioRule:
    """Likelihood-ratio form of the repair condition, valid in both prior regimes.

    With ``D_y = Pr(Y=y) * (w[y, a0] - w[y, aR])`` repair is optimal iff
    ``L1 * D_1 + L0 * D_0 > 0``; the direction of the ratio inequality follows
    from the sign of ``D_1``.
    """
    if not problem.binary_condition:
        raise TypeError("ratio rule needs a binary condition")
    w = problem.action_weights(BINARY_THETA)
    p = problem.condition_prior.weights
    d1 = p[1] * (w[1, 0] - w[1, 1])
    d0 = p[0] * (w[0, 0] - w[0, 1])
    if d1 > 0:
        return RatioRule(float(-d0 / d1), "above")
    if d1 < 0:
        return RatioRule(float(-d0 / d1), "below")
    return RatioRule(math.nan, "always" if d0 > 0 else "never")


# -- posterior decisions ------------------------------------------------------


def optimal_action_continuous(problem: OneStepProblem, s: float) -> Action:
    if not problem.continuous_signal:
        raise TypeError("problem does not observe a continuous signal")
    lj = log_action_costs(problem, [s])[0]
    if np.all(np.isneginf(lj)) or (not problem.binary_condition and np.exp(np.max(lj)) < 1e-300):
        raise ZeroEvidence(f"signal {s} has zero evidence")
    return AR if lj[0] > lj[1] else A0


def optimal_action_binary(problem: OneStepProblem, i: int) -> Action:
    """Posterior-optimal action for outcome ``i``; an impossible outcome keeps the prior action."""
    if problem.continuous_signal:
        raise TypeError("problem observes a continuous signal")
    if float(evidence_density(problem, [i])[0]) <= 0.0:
        return prior_optimal(problem)[0]
    j = action_costs(problem, [i])[0]
    return AR if j[0] > j[1] else A0


@dataclass(frozen=True)
class IntervalPolicy:
    """Repair exactly on a union of signal intervals."""

    repair_intervals: tuple[Interval, ...] = ()

    def repair(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        out = np.zeros(s.shape, dtype=bool)
        for iv in self.repair_intervals:
            out |= (s >= iv.lo) & (s <= iv.hi)
        return out

    def action(self, s: float) -> Action:
        return AR if bool(self.repair(s)) else A0

    @property
    def boundaries(self) -> list[float]:
        pts = [p for iv in self.repair_intervals for p in (iv.lo, iv.hi)]
        return sorted(p for p in pts if math.isfinite(p))

    def describe(self) -> str:
        if not self.repair_intervals:
            return "a0 for every signal"
        parts = ", ".join(f"[{iv.lo:.6g}, {iv.hi:.6g}]" for iv in self.repair_intervals)
        return f"aR iff s in {parts}; a0 otherwise"


@dataclass(frozen=True)
class BinaryPolicy:
    on_no_detection: Action = A0
    on_detection: Action = AR

    def action(self, i: int) -> Action:
        return self.on_detection if int(i) == 1 else self.on_no_detection

    def describe(self) -> str:
        return f"a(I=0)={self.on_no_detection}, a(I=1)={self.on_detection}"


Policy = Union[IntervalPolicy, BinaryPolicy]


def _midpoint(a: float, b: float, scale: str) -> float:
    if scale == "log" and a > 0 and b > 0:
        return math.sqrt(a * b)
    return 0.5 * (a + b)


def repair_boundaries(problem: OneStepProblem) -> list[float]:
    bracket = problem.search_bracket()
    return find_roots(
        lambda s: repair_margin(problem, s),
        bracket,
        problem.root_grid,
        scale=problem.root_scale,
        vectorized=True,
    )


def optimal_policy(problem: OneStepProblem) -> Policy:
    if not problem.continuous_signal:
        return BinaryPolicy(optimal_action_binary(problem, 0), optimal_action_binary(problem, 1))
    bracket = problem.search_bracket()
    sup = problem.signal_support()
    roots = repair_boundaries(problem)
    knots = [bracket.lo] + roots + [bracket.hi]
    intervals: list[Interval] = []
    for k in range(len(knots) - 1):
        a, b = knots[k], knots[k + 1]
        if not a < b:
            continue
        m = float(repair_margin(problem, _midpoint(a, b, problem.root_scale))[0])
        if m > 0:
            lo = sup.lo if k == 0 else a
            hi = sup.hi if k == len(knots) - 2 else b
            if intervals and intervals[-1].hi == lo:
                lo = intervals.pop().lo
            intervals.append(Interval(lo, hi))
    return IntervalPolicy(tuple(intervals))


def _interval_masses(roc: RocModel, policy: IntervalPolicy) -> np.ndarray:
    """``Pr(S in repair set | Y = y)`` from the class cdfs."""
    out = np.zeros(2)
    for iv in policy.repair_intervals:
        for y, cdf in enumerate((roc.cdf_y0, roc.cdf_y1)):
            out[y] += float(cdf(iv.hi)) - float(cdf(iv.lo))
    return np.clip(out, 0.0, 1.0)


def preposterior_cost(problem: OneStepProblem, policy: Policy, method: str = "auto") -> float:
    """Expected total cost of following ``policy`` after the NDE.

    ``method="auto"`` uses exact class-cdf masses for a ROC model that carries
    cdfs; ``"quadrature"`` always integrates over the signal.
    """
    if not problem.continuous_signal:
        j = action_costs(problem, [0, 1])
        return float(sum(j[i, 1 if policy.action(i) is AR else 0] for i in (0, 1)))

    nde = problem.nde
    if method == "auto" and isinstance(nde, RocModel) and nde.cdf_y0 is not None and nde.cdf_y1 is not None:
        m = _interval_masses(nde, policy)
        w = problem.action_weights(BINARY_THETA)
        return float(problem.condition_prior.weights @ (w[:, 1] * m + w[:, 0] * (1.0 - m)))
    if method not in ("auto", "quadrature"):
        raise ValueError(f"unknown method {method!r}")

    outer = problem.settings if problem.binary_condition else OUTER_SETTINGS

    def integrand(s):
        j = action_costs(problem, s)
        return np.where(policy.repair(s), j[:, 1], j[:, 0])

    return float(integrate(integrand, problem.signal_support(), outer, breakpoints=policy.boundaries))


def optimal_expected_cost(problem: OneStepProblem) -> tuple[float, Policy]:
    policy = optimal_policy(problem)
    return preposterior_cost(problem, policy), policy


# -- reports -----------------------------------------------------------------


@dataclass(frozen=True)
class PolicyReport:
    prior_action: str
    prior_cost: float
    posterior_policy: str
    expected_cost: float
    nde_cost: float = 0.0
    optimal_thresholds: tuple[tuple[str, float], ...] = ()
    unit: str = ""
    details: Mapping[str, object] = field(default_factory=dict)

    @property
    def voi(self) -> float:
        return self.prior_cost - self.expected_cost

    @property
    def net_voi(self) -> float:
        return self.voi - self.nde_cost

    def to_dict(self) -> dict:
        return {
            "prior_action": self.prior_action,
            "prior_cost": self.prior_cost,
            "posterior_policy": self.posterior_policy,
            "expected_cost": self.expected_cost,
            "voi": self.voi,
            "net_voi": self.net_voi,
            "nde_cost": self.nde_cost,
            "optimal_thresholds": [list(t) for t in self.optimal_thresholds],
            "unit": self.unit,
            "details": dict(self.details),
        }

    def to_text(self, title: str = "") -> str:
        u = f" {self.unit}" if self.unit else ""
        lines = [title] if title else []
        lines += [
            f"prior action        : {self.prior_action}",
            f"prior cost C_0      : {self.prior_cost:.6g}{u}",
            f"posterior policy    : {self.posterior_policy}",
            f"expected cost C_e   : {self.expected_cost:.6g}{u}",
            f"VoI                 : {self.voi:.6g}{u}",
            f"net VoI             : {self.net_voi:.6g}{u}",
        ]
        for name, val in self.optimal_thresholds:
            lines.append(f"{name:<20}: {val:.6g}")
        for key, val in self.details.items():
            lines.append(f"{key:<20}: {val}")
        return "\n".join(lines)


def solve_one_step(problem: OneStepProblem, unit: str = "") -> PolicyReport:
    a_prior, c0 = prior_optimal(problem)
    ce, policy = optimal_expected_cost(problem)
    thresholds: list[tuple[str, float]] = []
    details: dict = {}
    if isinstance(policy, IntervalPolicy):
        thresholds += [(f"boundary_{k + 1}", b) for k, b in enumerate(policy.boundaries)]
    if problem.binary_condition:
        rule = ratio_rule(problem)
        details["likelihood_ratio_rule"] = f"aR iff L1/L0 {rule.repair_when} {rule.threshold:.6g}"
        thresholds.append(("likelihood_ratio", rule.threshold))
    return PolicyReport(
        prior_action=str(a_prior),
        prior_cost=c0,
        posterior_policy=policy.describe(),
        expected_cost=ce,
        nde_cost=problem.nde_cost,
        optimal_thresholds=tuple(thresholds),
        unit=unit,
        details=details,
    )


# -- threshold calibration -----------------------------------------------------


def threshold_action_costs(
    problem: OneStepProblem, s_th, orientation: Optional[SignalOrientation] = None
) -> np.ndarray:
    """Binary-outcome action costs for fixed thresholds, shape ``(n, 2 outcomes, 2 actions)``.

    ``problem.nde`` is a BaseModel (PoD-curve family) or a RocModel
    (operating points along the curve).
    """
    s_th = np.atleast_1d(np.asarray(s_th, dtype=float))
    nde = problem.nde
    if isinstance(nde, BaseModel):
        orient = orientation or SignalOrientation.ABOVE

        def g(x):
            if orient is SignalOrientation.ABOVE:
                pod = nde.sf(s_th[None, :], x[:, None])
            else:
                pod = nde.cdf(s_th[None, :], x[:, None])
            lik = np.stack([1.0 - pod, pod], axis=-1)  # [x, s, i]
            return lik[:, :, :, None] * problem.action_weights(x)[:, None, None, :]

        return np.asarray(expect(problem.condition_prior, g, problem.settings,
                                 breakpoints=problem.failure.breakpoints))
    if isinstance(nde, RocModel):
        pfa, pod = detection_masses(nde, s_th)
        lik = np.stack([np.stack([1.0 - pfa, pfa], -1), np.stack([1.0 - pod, pod], -1)])  # [y, s, i]
        w = problem.action_weights(BINARY_THETA)  # [y, a]
        p = problem.condition_prior.weights
        return np.einsum("y,ysi,ya->sia", p, lik, w)
    raise TypeError("threshold sweeps need a BaseModel or RocModel")


def _optimal_from_costs(j: np.ndarray, prior_idx: int = 0, outcome_mass=None):
    """Per threshold: optimal cost and (a(I=0), a(I=1)); ties to a0.

    Outcomes with zero ``outcome_mass`` get the prior action ``prior_idx``.
    """
    acts = np.argmin(j, axis=-1)
    if outcome_mass is not None:
        acts = np.where(outcome_mass > 0.0, acts, prior_idx)
    return j.min(axis=-1).sum(axis=-1), acts


def _outcome_masses(problem: OneStepProblem, s_th, orientation: Optional[SignalOrientation] = None):
    """``Pr(I = i)`` per threshold, shape ``(n, 2)``."""
    s_th = np.atleast_1d(np.asarray(s_th, dtype=float))
    nde = problem.nde
    if isinstance(nde, RocModel):
        pfa, pod = detection_masses(nde, s_th)
        p1 = problem.condition_prior.p1
        det = (1.0 - p1) * pfa + p1 * pod
    else:
        orient = orientation or SignalOrientation.ABOVE

        def g(x):
            if orient is SignalOrientation.ABOVE:
                return nde.sf(s_th[None, :], x[:, None])
            return nde.cdf(s_th[None, :], x[:, None])

        det = np.asarray(expect(problem.condition_prior, g, problem.settings))
    return np.stack([1.0 - det, det], axis=-1)


@dataclass(frozen=True)
class CalibrationResult:
    s_th: float
    cost: float
    policy: BinaryPolicy
    curve: tuple[tuple[float, float, str, str], ...]


def calibrate_threshold(
    problem: OneStepProblem,
    bracket: Interval,
    grid_points: int = 241,
    *,
    scale: str = "linear",
    orientation: Optional[SignalOrientation] = None,
) -> CalibrationResult:
    """Minimize the optimal binary-outcome expected cost over the signal threshold."""

    prior_idx = ACTIONS.index(prior_optimal(problem)[0])

    def sweep(s):
        j = threshold_action_costs(problem, s, orientation)
        mass = _outcome_masses(problem, s, orientation)
        return _optimal_from_costs(j, prior_idx, mass)

    def cost(s):
        return sweep(s)[0]

    s_best, c_best = minimize_scalar(cost, bracket, grid_points, scale=scale, vectorized=True)
    grid = np.geomspace(bracket.lo, bracket.hi, grid_points) if scale == "log" else np.linspace(
        bracket.lo, bracket.hi, grid_points)
    costs, acts = sweep(grid)
    curve = tuple(
        (float(s), float(c), str(ACTIONS[a[0]]), str(ACTIONS[a[1]])) for s, c, a in zip(grid, costs, acts)
    )
    _, best_acts = sweep([s_best])
    policy = BinaryPolicy(ACTIONS[best_acts[0, 0]], ACTIONS[best_acts[0, 1]])
    return CalibrationResult(s_best, float(c_best), policy, curve)


def fixed_threshold_problem(
    problem: OneStepProblem, s_th: float, orientation: Optional[SignalOrientation] = None
) -> OneStepProblem:
    """Binary-outcome problem obtained by thresholding the signal at ``s_th``."""
    nde = problem.nde
    if isinstance(nde, BaseModel):
        return problem.with_nde(pod_curve_from_base(nde, s_th, orientation or SignalOrientation.ABOVE))
    if isinstance(nde, RocModel):
        return problem.with_nde(roc_point(nde, s_th))
    raise TypeError("thresholding needs a BaseModel or RocModel")


# -- cost surface over (PFA, PoD) -----------------------------------------------


@dataclass(frozen=True)
class CostSurface:
    pfa: np.ndarray
    pod: np.ndarray
    cost: np.ndarray  # [pod, pfa]
    action_i0: np.ndarray
    action_i1: np.ndarray
    zone: np.ndarray

    def rows(self):
        for j, d in enumerate(self.pod):
            for k, fa in enumerate(self.pfa):
                yield (float(fa), float(d), float(self.cost[j, k]),
                       str(self.action_i0[j, k]), str(self.action_i1[j, k]), str(self.zone[j, k]))


def cost_surface(problem: OneStepProblem, pfa_grid, pod_grid) -> CostSurface:
    """Optimal expected cost for every (PFA, PoD) confusion matrix.

    Zones: ``voi0`` where both outcomes map to the prior action,
    ``inverted`` where PoD < PFA (and VoI > 0), else ``informative``.
    """
    if not problem.binary_condition:
        raise TypeError("cost surface needs a binary condition")
    pfa = np.asarray(pfa_grid, dtype=float)
    pod = np.asarray(pod_grid, dtype=float)
    FA, D = np.meshgrid(pfa, pod)
    lik = np.stack([np.stack([1 - FA, FA], -1), np.stack([1 - D, D], -1)])  # [y, j, k, i]
    w = problem.action_weights(BINARY_THETA)
    p = problem.condition_prior.weights
    j = np.einsum("y,yjki,ya->jkia", p, lik, w)
    a_prior, _ = prior_optimal(problem)
    prior_idx = ACTIONS.index(a_prior)
    mass = np.einsum("y,yjki->jki", p, lik)
    cost, acts = _optimal_from_costs(j, prior_idx, mass)
    names = np.array([str(a) for a in ACTIONS])
    a0, a1 = names[acts[..., 0]], names[acts[..., 1]]
    zone = np.where((acts[..., 0] == prior_idx) & (acts[..., 1] == prior_idx), "voi0",
                    np.where(D < FA, "inverted", "informative"))
    return CostSurface(pfa, pod, cost, a0, a1, zone)


# -- binary-condition view of a continuous problem ---------------------------------


def binary_condition_problem(
    problem: OneStepProblem,
    x_th: float,
    exp_design: Optional[ContinuousDistribution] = None,
    orientation: SignalOrientation = SignalOrientation.ABOVE,
) -> OneStepProblem:
    """Model (3) counterpart of a base-model problem at critical threshold ``x_th``.

    Failure probabilities per class are made compatible with the continuous
    failure model; the ROC model is learned under ``exp_design`` (default:
    the application prior).
    """
    if not isinstance(problem.nde, BaseModel) or problem.binary_condition:
        raise TypeError("needs a base-model problem with a continuous condition prior")
    prior = problem.condition_prior
    p1, fm = binary_compatibility(prior, problem.failure, x_th, problem.settings)
    roc = roc_from_base(problem.nde, x_th, exp_design or prior, prior, orientation, problem.settings)
    return dataclasses.replace(problem, condition_prior=BinaryPrior(p1), nde=roc, failure=fm)


@dataclass(frozen=True)
class DesignRow:
    name: str
    s_th: float
    perceived_cost: float
    effective_cost: float
    policy: BinaryPolicy
    curve: tuple = ()


def experimental_design_report(
    problem: OneStepProblem,
    x_th: float,
    designs: Mapping[str, ContinuousDistribution],
    bracket: Interval,
    grid_points: int = 241,
    *,
    scale: str = "log",
    orientation: SignalOrientation = SignalOrientation.ABOVE,
) -> list[DesignRow]:
    """Perceived vs effective cost of thresholds calibrated on mismatched designs.

    Each design yields its own ROC model; its cost-minimizing threshold and
    cost are what the analyst *perceives*. The *effective* cost applies the
    perceived policy at that threshold under the ROC model learned on the
    application prior itself.
    """
    reference = binary_condition_problem(problem, x_th, None, orientation)

    def one(item):
        name, design = item
        perceived = binary_condition_problem(problem, x_th, design, orientation)
        cal = calibrate_threshold(perceived, bracket, grid_points, scale=scale)
        effective = preposterior_cost(fixed_threshold_problem(reference, cal.s_th), cal.policy)
        return DesignRow(name, cal.s_th, cal.cost, effective, cal.policy, cal.curve)

    return pmap(one, designs.items())


__all__ = [
    "BinaryPolicy",
    "CalibrationResult",
    "CostSurface",
    "DesignRow",
    "IntervalPolicy",
    "OneStepProblem",
    "PolicyReport",
    "RatioRule",
    "action_costs",
    "binary_condition_problem",
    "calibrate_threshold",
    "cost_surface",
    "evidence_density",
    "experimental_design_report",
    "fixed_threshold_problem",
    "likelihood_table",
    "log_action_costs",
    "optimal_action_binary",
    "optimal_action_continuous",
    "optimal_expected_cost",
    "optimal_policy",
    "pmap",
    "preposterior_cost",
    "prior_action_costs",
    "prior_optimal",
    "ratio_rule",
    "repair_boundaries",
    "repair_margin",
    "solve_one_step",
    "threshold_action_costs",
]
