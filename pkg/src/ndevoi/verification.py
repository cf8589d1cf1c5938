"""Named reference quantities per scenario and the manifest-driven checker.

``compute_quantities`` evaluates groups of named numbers (``prior.C0``,
``model1.Ce``, ``twostep.opt.s_th`` ...). The manifest shipped in
``data/verify_manifest.json`` lists expected values with tolerances; a check
passes when ``|value - expected| <= max(abs_tol, rel_tol * |expected|)``,
or when the value lies within given ``lower``/``upper`` bounds.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Mapping, Optional

import numpy as np

from .bayes import AR, BinaryPrior
from .config import ScenarioConfig
from .decision import (
    IntervalPolicy,
    binary_condition_problem,
    calibrate_threshold,
    cost_surface,
    experimental_design_report,
    fixed_threshold_problem,
    optimal_expected_cost,
    optimal_policy,
    preposterior_cost,
    prior_action_costs,
    prior_optimal,
    ratio_rule,
)
from .distributions import Exponential, Lognormal, Uniform
from .nde_models import (
    BaseModel,
    RocModel,
    confusion_from_pod_curve,
    pod_curve_from_base,
    roc_from_base,
    roc_indices,
    roc_point,
)
from .quadrature import Interval, integrate
from .scenarios import build_oracle_grid, oracle_expected_cost
from .twostep import (
    history_dependence_after_repair,
    history_table,
    memoryless_policy_cost,
    two_step_solve,
)

GROUPS = ("prior", "model1", "model2", "model3", "model4", "expdesign", "twostep", "props")


def _repair_flag(action) -> float:
    return 1.0 if action is AR else 0.0


def _prior_group(cfg: ScenarioConfig) -> dict:
    p = cfg.one_step_problem()
    costs = prior_action_costs(p)
    a, c0 = prior_optimal(p)
    out = {"prior.cost_a0": costs[0], "prior.cost_aR": costs[1], "prior.repair": _repair_flag(a), "prior.C0": c0}
    if cfg.c_F_money > 0:
        out["prior.pr_f_a0"] = costs[0] / cfg.c_F_money
    return out


def _model1_group(cfg: ScenarioConfig) -> dict:
    p = cfg.one_step_problem()
    _, c0 = prior_optimal(p)
    ce, pol = optimal_expected_cost(p)
    b = pol.boundaries
    return {"model1.boundary": b[0] if b else math.nan, "model1.Ce": ce, "model1.voi": c0 - ce}


def _model2_group(cfg: ScenarioConfig) -> dict:
    p = cfg.one_step_problem()
    _, c0 = prior_optimal(p)
    out = {}
    if cfg.s_th_fixed is not None:
        q = fixed_threshold_problem(p, cfg.s_th_fixed, cfg.signal_orientation)
        ce = preposterior_cost(q, optimal_policy(q))
        out.update({"model2.fixed.Ce": ce, "model2.fixed.voi": c0 - ce})
    cal = calibrate_threshold(p, cfg.sweep.interval(), cfg.sweep.points, scale=cfg.sweep.scale,
                              orientation=cfg.signal_orientation)
    out.update({"model2.opt.s_th": cal.s_th, "model2.opt.Ce": cal.cost,
                "model2.sweep_min": min(r[1] for r in cal.curve)})
    return out


def model3_problem(cfg: ScenarioConfig):
    p = cfg.one_step_problem()
    if isinstance(p.nde, BaseModel):
        return binary_condition_problem(p, cfg.x_th, None, cfg.signal_orientation)
    return p


def _model3_group(cfg: ScenarioConfig) -> dict:
    p = model3_problem(cfg)
    _, c0 = prior_optimal(p)
    ce, pol = optimal_expected_cost(p)
    out = {"model3.pr_y1": p.condition_prior.p1, "model3.ratio_threshold": ratio_rule(p).threshold,
           "model3.Ce": ce, "model3.voi": c0 - ce, "model3.voi_gain_pct": 100.0 * (c0 - ce) / c0,
           "model3.C0": c0}
    t = p.failure.table
    out["model3.pr_f_y0_a0"], out["model3.pr_f_y1_a0"] = t[list(t)[0]]
    b = pol.boundaries
    if b:
        out["model3.boundary"] = b[-1] if cfg.signal_orientation.value == "below" else b[0]
        out["model3.boundary_lo"], out["model3.boundary_hi"] = b[0], b[-1]
    return out


def _model4_group(cfg: ScenarioConfig) -> dict:
    p = model3_problem(cfg)
    _, c0 = prior_optimal(p)
    ce3, _ = optimal_expected_cost(p)
    out = {}
    if cfg.s_th_fixed is not None:
        q = fixed_threshold_problem(p, cfg.s_th_fixed)
        pol = optimal_policy(q)
        ce = preposterior_cost(q, pol)
        out.update({"model4.fixed.pod": q.nde.pod, "model4.fixed.pfa": q.nde.pfa, "model4.fixed.Ce": ce,
                    "model4.fixed.a_I1_repair": _repair_flag(pol.on_detection),
                    "model4.fixed.a_I0_repair": _repair_flag(pol.on_no_detection),
                    "model4.fixed.excess_pct": 100.0 * (ce / ce3 - 1.0)})
    cal = calibrate_threshold(p, cfg.sweep.interval(), cfg.sweep.points, scale=cfg.sweep.scale)
    out.update({"model4.opt.s_th": cal.s_th, "model4.opt.Ce": cal.cost,
                "model4.sweep_min": min(r[1] for r in cal.curve)})
    idx = roc_indices(p.nde)
    q = fixed_threshold_problem(p, idx.youden[0])
    out.update({"roc.auc": idx.auc, "roc.youden_s": idx.youden[0], "roc.corner_s": idx.closest_to_corner[0],
                "model4.youden.Ce": preposterior_cost(q, optimal_policy(q))})
    diag = np.linspace(0.0, 1.0, 101)
    surf = cost_surface(p, diag, diag)
    out["model4.diag_max_abs_voi"] = float(np.max(np.abs(np.diag(surf.cost) - c0)))
    return out


def _expdesign_group(cfg: ScenarioConfig) -> dict:
    p = cfg.one_step_problem()
    rows = experimental_design_report(p, cfg.x_th, cfg.designs(), cfg.sweep.interval(), cfg.sweep.points,
                                      scale=cfg.sweep.scale, orientation=cfg.signal_orientation)
    out = {}
    for r in rows:
        out.update({f"expdesign.{r.name}.s_th": r.s_th, f"expdesign.{r.name}.perceived": r.perceived_cost,
                    f"expdesign.{r.name}.effective": r.effective_cost})
    return out


def _twostep_group(cfg: ScenarioConfig) -> dict:
    ts = cfg.two_step
    prob = cfg.two_step_problem()
    cont = two_step_solve(prob, "continuous")
    out = {"twostep.prior.C0": cont.prior_cost,
           "twostep.prior.a1_repair": _repair_flag(cont.prior_actions[0]),
           "twostep.prior.a2_repair": _repair_flag(cont.prior_actions[1]),
           "twostep.continuous.Ce": cont.expected_cost, "twostep.continuous.voi": cont.voi}
    inner = [b for b in cont.first_step_boundaries if ts.sweep is None or ts.sweep.bracket[0] <= b <= ts.sweep.bracket[1]]
    out["twostep.continuous.first_step_switch"] = inner[0] if inner else math.nan
    lo, hi = ts.sweep.bracket if ts.sweep else (-1.0, 1.0)
    rows = history_table(prob, cont.value_table, np.linspace(lo, hi, 61))
    out["twostep.continuous.history_dependence"] = history_dependence_after_repair(rows)
    if ts.s_th_fixed is not None:
        fp = two_step_solve(prob, "fixed_point", s_th=ts.s_th_fixed)
        out.update({"twostep.fixed.pod": fp.pod, "twostep.fixed.pfa": fp.pfa, "twostep.fixed.Ce": fp.expected_cost,
                    "twostep.fixed.voi": fp.voi})
    if ts.sweep is not None:
        op = two_step_solve(prob, "optimize_point", bracket=ts.sweep.interval(), grid_points=ts.sweep.points)
        out.update({"twostep.opt.s_th": op.s_th, "twostep.opt.Ce": op.expected_cost, "twostep.opt.voi": op.voi,
                    "twostep.opt.zone": float(op.zone)})
        out["twostep.dominance_gap"] = op.expected_cost - cont.expected_cost
    if ts.s_th_memoryless is not None:
        m = two_step_solve(prob, "fixed_point", s_th=ts.s_th_memoryless)
        out.update({"twostep.memoryless.Ce": m.memoryless_cost, "twostep.memoryless.model4_Ce": m.expected_cost})
        if "twostep.opt.Ce" in out:
            out["twostep.memoryless.excess_over_opt"] = m.memoryless_cost - out["twostep.opt.Ce"]
            out["twostep.memoryless.model4_excess_over_opt"] = m.expected_cost - out["twostep.opt.Ce"]
    return out


# -- property suites ------------------------------------------------------------


def random_design(rng: np.random.Generator):
    kind = rng.integers(3)
    if kind == 0:
        return Exponential(float(rng.uniform(0.01, 0.2)))
    if kind == 1:
        return Lognormal(float(rng.uniform(-4.0, -1.0)), float(rng.uniform(0.3, 1.0)))
    return Uniform(0.0, float(rng.uniform(0.2, 1.0)))


def normalization_error(base: BaseModel, prior, x_th: float, design) -> float:
    """Largest |integral - 1| over the two class densities and the evidence mixture."""
    roc = roc_from_base(base, x_th, design, prior)
    p1 = roc.prior_y1

    def f(s):
        l0, l1 = roc.lik_y0(s), roc.lik_y1(s)
        return np.stack([l0, l1, (1 - p1) * l0 + p1 * l1], axis=-1)

    tot = integrate(f, base.signal_support)
    return float(np.max(np.abs(np.asarray(tot) - 1.0)))


def normalization_suite(cfg: ScenarioConfig, draws: int = 50, seed: int = 0) -> float:
    p = cfg.one_step_problem()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(draws):
        design = random_design(rng)
        x_th = float(design.quantile(rng.uniform(0.05, 0.95)))
        worst = max(worst, normalization_error(p.nde, p.condition_prior, x_th, design))
        x = float(rng.uniform(0.0, 0.5))
        tot = integrate(lambda s: p.nde.pdf(s, x), p.nde.signal_support)
        worst = max(worst, abs(float(tot) - 1.0))
    return worst


def commutativity_gap(base: BaseModel, prior, s_th: float, x_th: float, design, orientation) -> float:
    """max |(PoD, PFA)| difference between the PoD-curve route and the ROC route."""
    a = confusion_from_pod_curve(pod_curve_from_base(base, s_th, orientation), x_th, design)
    roc = roc_from_base(base, x_th, design, prior, orientation)
    b = roc_point(roc, s_th, method="density")
    return max(abs(a.pod - b.pod), abs(a.pfa - b.pfa))


def commutativity_suite(cfg: ScenarioConfig, n: int = 10) -> float:
    p = cfg.one_step_problem()
    lo, hi = cfg.sweep.bracket
    s_grid = np.geomspace(lo, hi, n) if cfg.sweep.scale == "log" else np.linspace(lo, hi, n)
    x_grid = np.linspace(0.03, 0.3, n)
    worst = 0.0
    for x_th in x_grid:
        for s in s_grid:
            worst = max(worst, commutativity_gap(p.nde, p.condition_prior, float(s), float(x_th),
                                                 p.condition_prior, cfg.signal_orientation))
    return worst


def dominance_suite(cfg: ScenarioConfig) -> float:
    """Largest violation (optimal continuous cost above a binary-threshold cost) over C_0."""
    p = cfg.one_step_problem()
    _, c0 = prior_optimal(p)
    worst = -math.inf
    pairs = []
    if isinstance(p.nde, BaseModel):
        pairs.append((p, cfg.signal_orientation))
        pairs.append((binary_condition_problem(p, cfg.x_th, None, cfg.signal_orientation), None))
    else:
        pairs.append((p, None))
    for prob, orient in pairs:
        ce, _ = optimal_expected_cost(prob)
        cal = calibrate_threshold(prob, cfg.sweep.interval(), cfg.sweep.points, scale=cfg.sweep.scale,
                                  orientation=orient)
        worst = max(worst, max(ce - r[1] for r in cal.curve) / c0)
    return worst


def oracle_suite(cfg: ScenarioConfig, sizes: Iterable[int] = (200, 400, 800)) -> list[float]:
    """Relative oracle error of the quadrature-optimal policy per grid size."""
    p = cfg.one_step_problem()
    ce, pol = optimal_expected_cost(p)
    return [abs(oracle_expected_cost(build_oracle_grid(p, n, n), p, pol) - ce) / ce for n in sizes]


def _props_group(cfg: ScenarioConfig) -> dict:
    out = {"props.dominance_violation": dominance_suite(cfg)}
    errs = oracle_suite(cfg)
    out["props.oracle_rel_err"] = errs[-1]
    out["props.oracle_monotone"] = 1.0 if all(b <= a for a, b in zip(errs, errs[1:])) else 0.0
    if isinstance(cfg.one_step_problem().nde, BaseModel):
        out["props.normalization_err"] = normalization_suite(cfg)
        out["props.commutativity_gap"] = commutativity_suite(cfg)
    return out


_GROUP_FN = {
    "prior": _prior_group,
    "model1": _model1_group,
    "model2": _model2_group,
    "model3": _model3_group,
    "model4": _model4_group,
    "expdesign": _expdesign_group,
    "twostep": _twostep_group,
    "props": _props_group,
}


def group_of(quantity: str) -> str:
    head = quantity.split(".", 1)[0]
    return "model4" if head == "roc" else head


def compute_quantities(cfg: ScenarioConfig, groups: Optional[Iterable[str]] = None) -> dict:
    groups = list(GROUPS if groups is None else groups)
    out: dict = {}
    for g in groups:
        if g not in _GROUP_FN:
            raise ValueError(f"unknown quantity group {g!r}")
        out.update(_GROUP_FN[g](cfg))
    return out


# -- manifest --------------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    id: str
    criterion: int
    scenario: str
    quantity: str
    expected: Optional[float] = None
    expected_any: tuple[float, ...] = ()
    abs_tol: float = 0.0
    rel_tol: float = 0.02
    lower: Optional[float] = None
    upper: Optional[float] = None
    overrides: Mapping[str, float] = None
    tag: str = "REFERENCE"

    @classmethod
    def from_dict(cls, d: Mapping) -> "Check":
        return cls(
            id=d["id"], criterion=int(d["criterion"]), scenario=d["scenario"], quantity=d["quantity"],
            expected=d.get("expected"), expected_any=tuple(d.get("expected_any", ())),
            abs_tol=float(d.get("abs_tol", 0.0)), rel_tol=float(d.get("rel_tol", 0.02)),
            lower=d.get("lower"), upper=d.get("upper"), overrides=dict(d.get("overrides", {})),
            tag=d.get("tag", "REFERENCE"),
        )

    def describe_target(self, rel_tol: Optional[float] = None) -> str:
        if self.lower is not None or self.upper is not None:
            lo = "-inf" if self.lower is None else f"{self.lower:g}"
            hi = "inf" if self.upper is None else f"{self.upper:g}"
            return f"in [{lo}, {hi}]"
        targets = (self.expected,) if self.expected is not None else self.expected_any
        rt = self.rel_tol if rel_tol is None else rel_tol
        tol = " or ".join(f"{t:g} ± {max(self.abs_tol, rt * abs(t)):.3g}" for t in targets)
        return tol

    def passes(self, value: float, rel_tol: Optional[float] = None) -> bool:
        if value is None or not math.isfinite(value):
            return False
        if self.lower is not None or self.upper is not None:
            return (self.lower is None or value >= self.lower) and (self.upper is None or value <= self.upper)
        rt = self.rel_tol if rel_tol is None else rel_tol
        targets = (self.expected,) if self.expected is not None else self.expected_any
        return any(abs(value - t) <= max(self.abs_tol, rt * abs(t)) + 1e-15 for t in targets)


def load_manifest() -> list[Check]:
    text = resources.files("ndevoi").joinpath("data/verify_manifest.json").read_text()
    return [Check.from_dict(d) for d in json.loads(text)["checks"]]


@dataclass(frozen=True)
class CheckResult:
    check: Check
    value: float
    passed: bool
    rel_tol: Optional[float] = None

    def line(self) -> str:
        c = self.check
        status = "PASS" if self.passed else "FAIL"
        ov = "" if not c.overrides else " [" + ", ".join(f"{k}={v:g}" for k, v in c.overrides.items()) + "]"
        return (f"{status} c{c.criterion:<2} {c.scenario}:{c.quantity}{ov} = {self.value:.6g} "
                f"(target {c.describe_target(self.rel_tol)}) [{c.tag}]")


def run_checks(cfg: ScenarioConfig, checks: Iterable[Check], rel_tol: Optional[float] = None) -> list[CheckResult]:
    """Evaluate ``checks`` for one scenario; overrides are applied per group of checks.

    ``rel_tol`` replaces the relative tolerance of value checks (bounds are unaffected).
    """
    checks = [c for c in checks if c.scenario == cfg.name]
    by_override: dict[tuple, list[Check]] = {}
    for c in checks:
        by_override.setdefault(tuple(sorted((c.overrides or {}).items())), []).append(c)
    results = {}
    for ov, group in by_override.items():
        sub = cfg.with_overrides(**dict(ov)) if ov else cfg
        groups = sorted({group_of(c.quantity) for c in group}, key=GROUPS.index)
        values = compute_quantities(sub, groups)
        for c in group:
            v = values.get(c.quantity, math.nan)
            results[c.id] = CheckResult(c, float(v), c.passes(float(v), rel_tol), rel_tol)
    return [results[c.id] for c in checks]


__all__ = [
    "Check",
    "CheckResult",
    "GROUPS",
    "commutativity_gap",
    "commutativity_suite",
    "compute_quantities",
    "dominance_suite",
    "load_manifest",
    "model3_problem",
    "normalization_error",
    "normalization_suite",
    "oracle_suite",
    "random_design",
    "run_checks",
]
