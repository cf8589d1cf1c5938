"""Two-step inspect-and-repair decision problem with a binary condition.

At each step i = 1, 2 the component is in state Y_i, an NDE outcome is
observed, and the operator repairs (aR, post-action state Y_i' = 0, cost c_R)
or does nothing (a0, Y_i' = Y_i). A cost c_F is charged at every step whose
post-action state is Y_i' = 1. The state evolves through
``Pr(Y_2 = 1 | Y_1')``.

Beliefs are ``b = Pr(Y = 1 | data)``. The step-2 value ``V2(b)`` is the
one-step optimal expected cost with prior ``b``; step 1 is solved by backward
induction on top of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy import special

from .bayes import A0, AR, ACTIONS, Action, BinaryPrior, FailureModel
from .decision import OneStepProblem, optimal_policy, preposterior_cost
from .nde_models import ConfusionMatrix, RocModel, detection_masses, roc_point
from .quadrature import DEFAULT_SETTINGS, Interval, QuadSettings, find_roots, integrate, minimize_scalar

CostPair = Union[float, tuple[float, float]]

BELIEF_GRID = np.unique(np.concatenate([[0.0], np.linspace(0.0, 1.0, 513), np.geomspace(1e-6, 1.0, 512)]))


def _pair(v: CostPair) -> tuple[float, float]:
    if isinstance(v, (tuple, list)):
        a, b = v
        return float(a), float(b)
    return float(v), float(v)


@dataclass(frozen=True, eq=False)
class TwoStepProblem:
    """``transition[k] = (Pr(Y2=0 | Y1'=k), Pr(Y2=1 | Y1'=k))``.

    ``c_R`` and ``c_F`` are either one value or a (step 1, step 2) pair.
    ``nde`` is a RocModel (continuous signal each step) or a ConfusionMatrix.
    """

    prior_y1: float
    transition: tuple[tuple[float, float], tuple[float, float]]
    c_R: CostPair
    c_F: CostPair
    nde: Optional[Union[RocModel, ConfusionMatrix]] = None
    root_bracket: Optional[Interval] = None
    settings: QuadSettings = DEFAULT_SETTINGS

    def __post_init__(self):
        if not 0.0 <= self.prior_y1 <= 1.0:
            raise ValueError("prior_y1 outside [0, 1]")
        tr = np.asarray(self.transition, dtype=float)
        if tr.shape != (2, 2) or np.any(tr < 0) or not np.allclose(tr.sum(axis=1), 1.0):
            raise ValueError("transition must be two probability rows")
        if min(_pair(self.c_R) + _pair(self.c_F)) < 0:
            raise ValueError("costs must be non-negative")

    @property
    def costs_R(self) -> tuple[float, float]:
        return _pair(self.c_R)

    @property
    def costs_F(self) -> tuple[float, float]:
        return _pair(self.c_F)

    def propagate(self, b):
        """``Pr(Y2 = 1)`` given ``Pr(Y1' = 1) = b``."""
        t0, t1 = self.transition[0][1], self.transition[1][1]
        return np.asarray(b) * t1 + (1.0 - np.asarray(b)) * t0


# -- open loop (no inspection) ---------------------------------------------------


def prior_solution(problem: TwoStepProblem) -> tuple[tuple[Action, Action], float]:
    """Best fixed action pair without NDE; ties favour a0."""
    (r1, r2), (f1, f2) = problem.costs_R, problem.costs_F
    best = None
    for a1 in ACTIONS:
        b1 = 0.0 if a1 is AR else problem.prior_y1
        c1 = (r1 if a1 is AR else 0.0) + f1 * b1
        b2 = float(problem.propagate(b1))
        for a2 in ACTIONS:
            c = c1 + (r2 if a2 is AR else f2 * b2)
            if best is None or c < best[1] - 1e-15:
                best = ((a1, a2), c)
    return best


# -- binary outcomes (fixed operating point) ----------------------------------------


def _fixed_point_arrays(problem: TwoStepProblem, pfa, pod):
    """Vectorized backward induction for binary outcomes.

    Returns (cost, a1[i1], a2[i1, i2]) with boolean "repair" arrays whose
    leading axes index outcomes and trailing axes broadcast over (pfa, pod).
    """
    pfa, pod = np.broadcast_arrays(np.asarray(pfa, dtype=float), np.asarray(pod, dtype=float))
    (r1, r2), (f1, f2) = problem.costs_R, problem.costs_F
    l1 = np.stack([1.0 - pod, pod])  # Pr(I = i | Y = 1)
    l0 = np.stack([1.0 - pfa, pfa])

    def stage2(b):
        j0 = f2 * b * l1
        jr = r2 * (b * l1 + (1.0 - b) * l0)
        rep = jr < j0
        return np.where(rep, jr, j0).sum(axis=0), rep

    p = problem.prior_y1
    ev = p * l1 + (1.0 - p) * l0
    with np.errstate(invalid="ignore", divide="ignore"):
        b1 = np.where(ev > 0, p * l1 / np.where(ev > 0, ev, 1.0), p)
    v_keep = np.empty_like(b1)
    rep2_keep = np.empty((2,) + b1.shape, dtype=bool)
    for i in (0, 1):
        v_keep[i], rep2_keep[:, i] = stage2(problem.propagate(b1[i]))
    v_rep, rep2_rep = stage2(problem.propagate(np.zeros_like(pfa)))
    j0 = f1 * p * l1 + ev * v_keep
    jr = ev * (r1 + v_rep)
    rep1 = jr < j0
    cost = np.where(rep1, jr, j0).sum(axis=0)
    # a2 indexed [i1, i2]; rep2_keep is [i2, i1]
    rep2 = np.where(rep1[:, None], rep2_rep[None, :], np.swapaxes(rep2_keep, 0, 1))
    return cost, rep1, rep2


@dataclass(frozen=True)
class PolicyTree:
    """``a1[i1]`` and ``a2[(i1, i2)]`` for binary outcomes."""

    a1: tuple[Action, Action]
    a2: tuple[tuple[Action, Action], tuple[Action, Action]]

    def describe(self) -> str:
        parts = [f"a1(I1={i})={self.a1[i]}" for i in (0, 1)]
        parts += [f"a2(I1={i},I2={k})={self.a2[i][k]}" for i in (0, 1) for k in (0, 1)]
        return ", ".join(parts)


MEMORYLESS = PolicyTree((A0, AR), ((A0, AR), (A0, AR)))


def _act(flag) -> Action:
    return AR if bool(flag) else A0


def zone_of(tree: PolicyTree) -> int:
    """Action zone 1-5 of a policy tree, 0 when none applies.

    1 memoryless; 2 memoryless first step, second-step repair only after
    (I1, I2) = (0, 1); 3 always repair first, then repair iff I2 = 1;
    4 memoryless first step, never repair second; 5 (aR, a0) regardless.
    """
    memo1 = tree.a1 == (A0, AR)
    a2 = tree.a2
    if tree == MEMORYLESS:
        return 1
    if memo1 and a2 == ((A0, AR), (A0, A0)):
        return 2
    if tree.a1 == (AR, AR) and a2 == ((A0, AR), (A0, AR)):
        return 3
    if memo1 and a2 == ((A0, A0), (A0, A0)):
        return 4
    if tree.a1 == (AR, AR) and a2 == ((A0, A0), (A0, A0)):
        return 5
    return 0


def fixed_point_costs(problem: TwoStepProblem, pfa, pod) -> np.ndarray:
    """Optimal binary-outcome expected cost, vectorized over operating points."""
    return _fixed_point_arrays(problem, pfa, pod)[0]


def fixed_point_solution(problem: TwoStepProblem, pfa: float, pod: float) -> tuple[float, PolicyTree]:
    cost, rep1, rep2 = _fixed_point_arrays(problem, pfa, pod)
    tree = PolicyTree(
        (_act(rep1[0]), _act(rep1[1])),
        ((_act(rep2[0, 0]), _act(rep2[0, 1])), (_act(rep2[1, 0]), _act(rep2[1, 1]))),
    )
    return float(cost), tree


def policy_tree_cost(problem: TwoStepProblem, pfa: float, pod: float, tree: PolicyTree) -> float:
    """Expected cost of a policy tree by explicit enumeration of (Y1, I1, Y2, I2)."""
    (r1, r2), (f1, f2) = problem.costs_R, problem.costs_F
    p_i = {0: (1.0 - pfa, pfa), 1: (1.0 - pod, pod)}  # p_i[y][i]
    total = 0.0
    for y1 in (0, 1):
        py1 = problem.prior_y1 if y1 else 1.0 - problem.prior_y1
        for i1 in (0, 1):
            w1 = py1 * p_i[y1][i1]
            if w1 == 0.0:
                continue
            a1 = tree.a1[i1]
            y1p = 0 if a1 is AR else y1
            c1 = (r1 if a1 is AR else 0.0) + f1 * y1p
            for y2 in (0, 1):
                w2 = w1 * problem.transition[y1p][y2]
                for i2 in (0, 1):
                    w = w2 * p_i[y2][i2]
                    if w == 0.0:
                        continue
                    a2 = tree.a2[i1][i2]
                    y2p = 0 if a2 is AR else y2
                    total += w * (c1 + (r2 if a2 is AR else 0.0) + f2 * y2p)
    return total


def memoryless_policy_cost(problem: TwoStepProblem, pfa: float, pod: float) -> float:
    """Repair at step i iff I_i = 1."""
    return policy_tree_cost(problem, pfa, pod, MEMORYLESS)


def zone_map(problem: TwoStepProblem, pfa_grid, pod_grid) -> np.ndarray:
    """Action zones over a (PoD, PFA) grid, indexed ``[pod, pfa]``."""
    fa, d = np.meshgrid(np.asarray(pfa_grid, float), np.asarray(pod_grid, float))
    _, rep1, rep2 = _fixed_point_arrays(problem, fa, d)
    zones = np.zeros(fa.shape, dtype=int)
    for idx in np.ndindex(fa.shape):
        tree = PolicyTree(
            (_act(rep1[(0,) + idx]), _act(rep1[(1,) + idx])),
            tuple(tuple(_act(rep2[(i, k) + idx]) for k in (0, 1)) for i in (0, 1)),
        )
        zones[idx] = zone_of(tree)
    return zones


# -- continuous signal ----------------------------------------------------------


def _step2_problem(problem: TwoStepProblem, b: float) -> OneStepProblem:
    r2, f2 = problem.costs_R[1], problem.costs_F[1]
    fm = FailureModel.binary({A0: (0.0, 1.0), AR: (0.0, 0.0)})
    return OneStepProblem(
        BinaryPrior(float(min(max(b, 0.0), 1.0))), problem.nde, fm, r2, f2,
        settings=problem.settings, root_bracket=problem.root_bracket,
    )


def v2_exact(problem: TwoStepProblem, b: float) -> float:
    """Step-2 optimal expected cost at belief ``b`` (repair intervals + cdf masses)."""
    if b <= 0.0:
        return 0.0
    sub = _step2_problem(problem, b)
    return preposterior_cost(sub, optimal_policy(sub))


@dataclass(frozen=True)
class ValueTable:
    beliefs: np.ndarray
    values: np.ndarray

    def __call__(self, b):
        return np.interp(b, self.beliefs, self.values)


def tabulate_v2(problem: TwoStepProblem, grid: np.ndarray = BELIEF_GRID) -> ValueTable:
    from .decision import pmap

    vals = pmap(lambda b: v2_exact(problem, float(b)), grid)
    return ValueTable(np.asarray(grid, float), np.asarray(vals, float))


def _log_terms(problem: TwoStepProblem, s):
    """log of the joint densities ``(1-p) L0(s)`` and ``p L1(s)``."""
    l0, l1 = problem.nde.log_likelihoods(s)
    p = problem.prior_y1
    with np.errstate(divide="ignore"):
        return l0 + np.log1p(-p), l1 + np.log(p)


def _stage1(problem: TwoStepProblem, v2: ValueTable, s):
    """(evidence, J_keep / ev, J_repair / ev) over first-step signals."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    a, c = _log_terms(problem, s)
    log_ev = np.logaddexp(a, c)
    with np.errstate(invalid="ignore"):
        b1 = np.where(np.isfinite(log_ev), special.expit(c - a), problem.prior_y1)
    r1, f1 = problem.costs_R[0], problem.costs_F[0]
    keep = f1 * b1 + v2(problem.propagate(b1))
    rep = r1 + float(v2(problem.propagate(0.0)))
    return np.exp(log_ev), keep, np.full_like(keep, rep)


def first_step_repair(problem: TwoStepProblem, v2: ValueTable, s1) -> np.ndarray:
    _, keep, rep = _stage1(problem, v2, s1)
    return rep < keep


def second_step_policy(problem: TwoStepProblem, s1: float, a1: Action):
    """Optimal step-2 repair intervals after observing ``s1`` and acting ``a1``."""
    if a1 is AR:
        b = 0.0
    else:
        a, c = _log_terms(problem, np.atleast_1d(float(s1)))
        b = float(special.expit(c - a)[0])
    return optimal_policy(_step2_problem(problem, float(problem.propagate(b))))


def history_table(problem: TwoStepProblem, v2: ValueTable, s1_grid) -> list[tuple]:
    """Rows ``(s1, a1, Pr(Y2=1 | s1, a1), step-2 repair boundaries)``."""
    s1_grid = np.asarray(s1_grid, dtype=float)
    rep = first_step_repair(problem, v2, s1_grid)
    rows = []
    for s1, r in zip(s1_grid, rep):
        a1 = _act(r)
        if a1 is AR:
            b2 = float(problem.propagate(0.0))
        else:
            a, c = _log_terms(problem, np.atleast_1d(s1))
            b2 = float(problem.propagate(special.expit(c - a)[0]))
        rows.append((float(s1), a1, b2, tuple(second_step_policy(problem, s1, a1).boundaries)))
    return rows


def history_dependence_after_repair(rows) -> float:
    """Largest spread of any step-2 boundary across first-step repairs (0 = independent of s1)."""
    bounds = [r[3] for r in rows if r[1] is AR]
    if len(bounds) < 2:
        return 0.0
    if len({len(b) for b in bounds}) > 1:
        return math.inf
    arr = np.asarray(bounds, dtype=float)
    return float(np.max(arr.max(axis=0) - arr.min(axis=0))) if arr.size else 0.0


@dataclass(frozen=True)
class TwoStepResult:
    mode: str
    expected_cost: float
    prior_cost: float
    prior_actions: tuple[Action, Action]
    s_th: float = math.nan
    pfa: float = math.nan
    pod: float = math.nan
    policy: Optional[PolicyTree] = None
    zone: int = 0
    first_step_boundaries: tuple[float, ...] = ()
    memoryless_cost: float = math.nan
    curve: tuple = field(default=(), repr=False)
    value_table: Optional[ValueTable] = field(default=None, repr=False)

    @property
    def voi(self) -> float:
        return self.prior_cost - self.expected_cost

    def to_dict(self) -> dict:
        out = {
            "mode": self.mode,
            "expected_cost": self.expected_cost,
            "prior_cost": self.prior_cost,
            "prior_actions": [str(a) for a in self.prior_actions],
            "voi": self.voi,
        }
        if self.mode != "continuous":
            out.update(s_th=self.s_th, pfa=self.pfa, pod=self.pod, zone=self.zone,
                       memoryless_cost=self.memoryless_cost,
                       policy=self.policy.describe() if self.policy else None)
        else:
            out["first_step_boundaries"] = list(self.first_step_boundaries)
        return out

    def to_text(self) -> str:
        lines = [f"mode                : {self.mode}",
                 f"prior actions       : {', '.join(str(a) for a in self.prior_actions)}",
                 f"prior cost          : {self.prior_cost:.6g}",
                 f"expected cost       : {self.expected_cost:.6g}",
                 f"VoI                 : {self.voi:.6g}"]
        if self.mode == "continuous":
            lines.append("first-step switches : " + ", ".join(f"{b:.6g}" for b in self.first_step_boundaries))
        else:
            lines += [f"s_th                : {self.s_th:.6g}",
                      f"(PFA, PoD)          : ({self.pfa:.6g}, {self.pod:.6g})",
                      f"policy              : {self.policy.describe()}",
                      f"zone                : {self.zone}",
                      f"memoryless cost     : {self.memoryless_cost:.6g}"]
        return "\n".join(lines)


def _continuous(problem: TwoStepProblem) -> TwoStepResult:
    if not isinstance(problem.nde, RocModel):
        raise TypeError("continuous mode needs a RocModel")
    if problem.root_bracket is None:
        raise ValueError("continuous mode needs root_bracket")
    v2 = tabulate_v2(problem)

    def margin(s):
        _, keep, rep = _stage1(problem, v2, s)
        return keep - rep

    roots = find_roots(margin, problem.root_bracket, 2001, vectorized=True)

    def integrand(s):
        ev, keep, rep = _stage1(problem, v2, s)
        return ev * np.minimum(keep, rep)

    settings = QuadSettings(rel_tol=1e-8, abs_tol=1e-12, max_subdivisions=20000)
    cost = float(integrate(integrand, problem.nde.signal_support, settings, breakpoints=roots))
    actions, c0 = prior_solution(problem)
    return TwoStepResult("continuous", cost, c0, actions, first_step_boundaries=tuple(roots),
                         curve=tuple(zip(v2.beliefs.tolist(), v2.values.tolist())), value_table=v2)


def _point_result(problem: TwoStepProblem, mode: str, s_th: float, cm: ConfusionMatrix, curve=()) -> TwoStepResult:
    cost, tree = fixed_point_solution(problem, cm.pfa, cm.pod)
    actions, c0 = prior_solution(problem)
    return TwoStepResult(mode, cost, c0, actions, s_th=s_th, pfa=cm.pfa, pod=cm.pod, policy=tree,
                         zone=zone_of(tree), memoryless_cost=memoryless_policy_cost(problem, cm.pfa, cm.pod),
                         curve=curve)


def two_step_solve(
    problem: TwoStepProblem,
    mode: str = "continuous",
    *,
    s_th: Optional[float] = None,
    bracket: Optional[Interval] = None,
    grid_points: int = 401,
) -> TwoStepResult:
    """Solve the two-step problem.

    ``continuous``: act on the full signal each step. ``fixed_point``: act on
    binary outcomes at threshold ``s_th`` (or the given ConfusionMatrix).
    ``optimize_point``: fixed point with ``s_th`` minimizing the cost over
    ``bracket``.
    """
    if mode == "continuous":
        return _continuous(problem)
    if mode == "fixed_point":
        if isinstance(problem.nde, ConfusionMatrix):
            return _point_result(problem, mode, math.nan, problem.nde)
        if s_th is None:
            raise ValueError("fixed_point mode needs s_th")
        return _point_result(problem, mode, float(s_th), roc_point(problem.nde, s_th))
    if mode == "optimize_point":
        if not isinstance(problem.nde, RocModel) or bracket is None:
            raise ValueError("optimize_point mode needs a RocModel and a bracket")

        def cost(s):
            pfa, pod = detection_masses(problem.nde, s)
            return fixed_point_costs(problem, pfa, pod)

        s_best, _ = minimize_scalar(cost, bracket, grid_points, vectorized=True)
        grid = np.linspace(bracket.lo, bracket.hi, grid_points)
        curve = tuple(zip(grid.tolist(), np.asarray(cost(grid)).tolist()))
        return _point_result(problem, mode, s_best, roc_point(problem.nde, s_best), curve)
    raise ValueError(f"unknown mode {mode!r}")


__all__ = [
    "BELIEF_GRID",
    "MEMORYLESS",
    "PolicyTree",
    "TwoStepProblem",
    "TwoStepResult",
    "ValueTable",
    "first_step_repair",
    "fixed_point_costs",
    "fixed_point_solution",
    "history_dependence_after_repair",
    "history_table",
    "memoryless_policy_cost",
    "policy_tree_cost",
    "prior_solution",
    "second_step_policy",
    "tabulate_v2",
    "two_step_solve",
    "v2_exact",
    "zone_map",
    "zone_of",
]
