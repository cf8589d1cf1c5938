"""Scenario configuration: a JSON document describing one inspection problem.

Money amounts carry a ``_money`` suffix and are in the scenario's ``unit``;
signal values are in ``signal_unit``. Every validation failure raises
``ConfigError`` naming the offending field path.

Top-level fields
----------------
name, unit, signal_unit
condition_prior      distribution record (continuous condition X) | omitted
prior_y1             Pr(Y = 1) (binary condition) | omitted
nde                  {"kind": "base_model", "model": {...}}
                     {"kind": "roc", "y0": dist, "y1": dist}
                     {"kind": "confusion", "pod": p, "pfa": p}
orientation          "above" | "below": which side of s_th is an indication
failure              {"kind": "lognormal_cdf", "floor", "mu_log", "sigma_log"}
                     {"kind": "binary", "a0": [p_y0, p_y1], "aR": [p_y0, p_y1]}
p_F_given_repair     repaired failure probability (lognormal_cdf only)
c_R_money, c_F_money, nde_cost_money
x_th                 critical condition for the binary view (base models)
s_th_fixed           fixed signal threshold used by reports (optional)
experimental_designs {name: distribution record}
root_bracket         [lo, hi] search range for repair-zone boundaries
sweep                {"bracket": [lo, hi], "scale": "linear"|"log", "points": n}
two_step             optional block, see ``TwoStepConfig``
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional

from .bayes import A0, AR, BinaryPrior, FailureModel, lognormal_cdf_failure
from .decision import OneStepProblem
from .distributions import ContinuousDistribution, from_dict
from .errors import ConfigError
from .nde_models import (
    BaseModel,
    ConfusionMatrix,
    RocModel,
    SignalOrientation,
    lognormal_polynomial_base,
    roc_given,
)
from .quadrature import Interval
from .twostep import TwoStepProblem


def _number(raw: Mapping, key: str, path: str, *, lo=-math.inf, hi=math.inf, required=True, default=None):
    if key not in raw or raw[key] is None:
        if required:
            raise ConfigError(f"{path}{key}", "missing")
        return default
    v = raw[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{path}{key}", f"expected a number, got {v!r}")
    v = float(v)
    if not math.isfinite(v) or not lo <= v <= hi:
        raise ConfigError(f"{path}{key}", f"value {v} outside [{lo}, {hi}]")
    return v


def _pair(raw: Mapping, key: str, path: str, *, required=True):
    if key not in raw or raw[key] is None:
        if required:
            raise ConfigError(f"{path}{key}", "missing")
        return None
    v = raw[key]
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise ConfigError(f"{path}{key}", "expected a [lo, hi] pair")
    lo, hi = (_number({"v": x}, "v", f"{path}{key}.") for x in v)
    return float(lo), float(hi)


def _interval(raw: Mapping, key: str, path: str, *, required=True) -> Optional[tuple[float, float]]:
    v = _pair(raw, key, path, required=required)
    if v is not None and not v[0] < v[1]:
        raise ConfigError(f"{path}{key}", "requires lo < hi")
    return v


def _dist(record, path: str) -> dict:
    if not isinstance(record, Mapping):
        raise ConfigError(path, "expected a distribution object")
    try:
        from_dict(record)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(path, str(exc).strip("'\"")) from None
    return dict(record)


@dataclass(frozen=True)
class SweepConfig:
    bracket: tuple[float, float]
    scale: str = "linear"
    points: int = 241

    @classmethod
    def from_dict(cls, raw: Mapping, path: str) -> "SweepConfig":
        if not isinstance(raw, Mapping):
            raise ConfigError(path.rstrip("."), "expected an object")
        scale = raw.get("scale", "linear")
        if scale not in ("linear", "log"):
            raise ConfigError(f"{path}scale", f"expected 'linear' or 'log', got {scale!r}")
        bracket = _interval(raw, "bracket", path)
        if scale == "log" and bracket[0] <= 0:
            raise ConfigError(f"{path}bracket", "log sweeps need a positive bracket")
        points = raw.get("points", 241)
        if isinstance(points, bool) or not isinstance(points, int) or points < 3:
            raise ConfigError(f"{path}points", "expected an integer >= 3")
        return cls(bracket, scale, points)

    def to_dict(self) -> dict:
        return {"bracket": list(self.bracket), "scale": self.scale, "points": self.points}

    def interval(self) -> Interval:
        return Interval(*self.bracket)


@dataclass(frozen=True)
class TwoStepConfig:
    """``transition[k] = [Pr(Y2=0 | Y1'=k), Pr(Y2=1 | Y1'=k)]``."""

    prior_y1: float
    transition: tuple[tuple[float, float], tuple[float, float]]
    c_R_money: float
    c_F_money: float
    s_th_fixed: Optional[float] = None
    s_th_memoryless: Optional[float] = None
    sweep: Optional[SweepConfig] = None

    @classmethod
    def from_dict(cls, raw: Mapping, path: str = "two_step.") -> "TwoStepConfig":
        if not isinstance(raw, Mapping):
            raise ConfigError(path.rstrip("."), "expected an object")
        tr = raw.get("transition")
        if not isinstance(tr, (list, tuple)) or len(tr) != 2:
            raise ConfigError(f"{path}transition", "expected two rows indexed by Y1'")
        rows = []
        for k, row in enumerate(tr):
            p = _pair({"r": row}, "r", f"{path}transition[{k}]")
            if min(p) < 0 or abs(sum(p) - 1.0) > 1e-9:
                raise ConfigError(f"{path}transition[{k}]", "probabilities must be >= 0 and sum to 1")
            rows.append(p)
        sweep = raw.get("sweep")
        return cls(
            prior_y1=_number(raw, "prior_y1", path, lo=0.0, hi=1.0),
            transition=(rows[0], rows[1]),
            c_R_money=_number(raw, "c_R_money", path, lo=0.0),
            c_F_money=_number(raw, "c_F_money", path, lo=0.0),
            s_th_fixed=_number(raw, "s_th_fixed", path, required=False),
            s_th_memoryless=_number(raw, "s_th_memoryless", path, required=False),
            sweep=None if sweep is None else SweepConfig.from_dict(sweep, f"{path}sweep."),
        )

    def to_dict(self) -> dict:
        out = {
            "prior_y1": self.prior_y1,
            "transition": [list(r) for r in self.transition],
            "c_R_money": self.c_R_money,
            "c_F_money": self.c_F_money,
        }
        if self.s_th_fixed is not None:
            out["s_th_fixed"] = self.s_th_fixed
        if self.s_th_memoryless is not None:
            out["s_th_memoryless"] = self.s_th_memoryless
        if self.sweep is not None:
            out["sweep"] = self.sweep.to_dict()
        return out


_NDE_KINDS = ("base_model", "roc", "confusion")
_FAILURE_KINDS = ("lognormal_cdf", "binary")


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    nde: dict
    failure: dict
    c_R_money: float
    c_F_money: float
    sweep: SweepConfig
    condition_prior: Optional[dict] = None
    prior_y1: Optional[float] = None
    orientation: str = "above"
    unit: str = ""
    signal_unit: str = ""
    p_F_given_repair: Optional[float] = None
    nde_cost_money: float = 0.0
    x_th: Optional[float] = None
    s_th_fixed: Optional[float] = None
    experimental_designs: Mapping[str, dict] = field(default_factory=dict)
    root_bracket: Optional[tuple[float, float]] = None
    two_step: Optional[TwoStepConfig] = None

    # -- parsing -------------------------------------------------------------

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "ScenarioConfig":
        if not isinstance(raw, Mapping):
            raise ConfigError("<root>", "expected a JSON object")
        name = raw.get("name")
        if not isinstance(name, str) or not name:
            raise ConfigError("name", "expected a non-empty string")

        has_cont = raw.get("condition_prior") is not None
        has_bin = raw.get("prior_y1") is not None
        if has_cont == has_bin:
            raise ConfigError("condition_prior", "give exactly one of condition_prior or prior_y1")
        condition_prior = _dist(raw["condition_prior"], "condition_prior") if has_cont else None
        prior_y1 = _number(raw, "prior_y1", "", lo=0.0, hi=1.0) if has_bin else None

        nde = raw.get("nde")
        if not isinstance(nde, Mapping) or nde.get("kind") not in _NDE_KINDS:
            raise ConfigError("nde.kind", f"expected one of {_NDE_KINDS}")
        nde = dict(nde)
        if nde["kind"] == "base_model":
            if not has_cont:
                raise ConfigError("nde.kind", "base_model needs condition_prior")
            model = nde.get("model")
            if not isinstance(model, Mapping) or model.get("kind") != "lognormal_polynomial":
                raise ConfigError("nde.model.kind", "expected 'lognormal_polynomial'")
            coeffs = model.get("median_coefficients")
            if not isinstance(coeffs, list) or not coeffs:
                raise ConfigError("nde.model.median_coefficients", "expected a list of numbers")
            for k, c in enumerate(coeffs):
                _number({"c": c}, "c", f"nde.model.median_coefficients[{k}].", lo=0.0)
            _number(model, "sigma_log", "nde.model.", lo=1e-300)
            try:
                lognormal_polynomial_base(coeffs, model["sigma_log"])
            except ValueError as exc:
                raise ConfigError("nde.model.median_coefficients", str(exc)) from None
        elif nde["kind"] == "roc":
            if not has_bin:
                raise ConfigError("nde.kind", "roc needs prior_y1")
            for key in ("y0", "y1"):
                _dist(nde.get(key), f"nde.{key}")
        else:
            if not has_bin:
                raise ConfigError("nde.kind", "confusion needs prior_y1")
            _number(nde, "pod", "nde.", lo=0.0, hi=1.0)
            _number(nde, "pfa", "nde.", lo=0.0, hi=1.0)

        orientation = raw.get("orientation", "above")
        if orientation not in ("above", "below"):
            raise ConfigError("orientation", f"expected 'above' or 'below', got {orientation!r}")

        failure = raw.get("failure")
        if not isinstance(failure, Mapping) or failure.get("kind") not in _FAILURE_KINDS:
            raise ConfigError("failure.kind", f"expected one of {_FAILURE_KINDS}")
        failure = dict(failure)
        p_rep = None
        if failure["kind"] == "lognormal_cdf":
            if not has_cont:
                raise ConfigError("failure.kind", "lognormal_cdf needs condition_prior")
            _number(failure, "floor", "failure.", lo=0.0, hi=1.0)
            _number(failure, "mu_log", "failure.")
            _number(failure, "sigma_log", "failure.", lo=1e-300)
            p_rep = _number(raw, "p_F_given_repair", "", lo=0.0, hi=1.0)
        else:
            if not has_bin:
                raise ConfigError("failure.kind", "binary failure needs prior_y1")
            for key in ("a0", "aR"):
                p = _pair(failure, key, "failure.")
                if not all(0.0 <= v <= 1.0 for v in p):
                    raise ConfigError(f"failure.{key}", "probabilities must lie in [0, 1]")

        designs = raw.get("experimental_designs", {}) or {}
        if not isinstance(designs, Mapping):
            raise ConfigError("experimental_designs", "expected an object of name -> distribution")
        designs = {str(k): _dist(v, f"experimental_designs.{k}") for k, v in designs.items()}

        x_th = _number(raw, "x_th", "", required=False)
        if designs and x_th is None:
            raise ConfigError("x_th", "required when experimental_designs are given")
        if x_th is not None and has_cont:
            lo, hi = from_dict(condition_prior).support.lo, from_dict(condition_prior).support.hi
            if not lo < x_th < hi:
                raise ConfigError("x_th", "must lie inside the condition support")

        if "sweep" not in raw:
            raise ConfigError("sweep", "missing")
        two = raw.get("two_step")
        if two is not None and nde["kind"] == "base_model":
            raise ConfigError("two_step", "two-step problems need a binary condition (roc or confusion nde)")

        return cls(
            name=name,
            nde=nde,
            failure=failure,
            c_R_money=_number(raw, "c_R_money", "", lo=0.0),
            c_F_money=_number(raw, "c_F_money", "", lo=0.0),
            sweep=SweepConfig.from_dict(raw["sweep"], "sweep."),
            condition_prior=condition_prior,
            prior_y1=prior_y1,
            orientation=orientation,
            unit=str(raw.get("unit", "")),
            signal_unit=str(raw.get("signal_unit", "")),
            p_F_given_repair=p_rep,
            nde_cost_money=_number(raw, "nde_cost_money", "", lo=0.0, required=False, default=0.0),
            x_th=x_th,
            s_th_fixed=_number(raw, "s_th_fixed", "", required=False),
            experimental_designs=designs,
            root_bracket=_interval(raw, "root_bracket", "", required=False),
            two_step=None if two is None else TwoStepConfig.from_dict(two),
        )

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("<root>", f"invalid JSON: {exc}") from None
        return cls.from_dict(raw)

    @classmethod
    def load(cls, path) -> "ScenarioConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError("<file>", str(exc)) from None
        return cls.from_json(text)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"name": self.name, "unit": self.unit, "signal_unit": self.signal_unit}
        if self.condition_prior is not None:
            out["condition_prior"] = dict(self.condition_prior)
        else:
            out["prior_y1"] = self.prior_y1
        out.update(nde=json.loads(json.dumps(self.nde)), orientation=self.orientation,
                   failure=json.loads(json.dumps(self.failure)))
        if self.p_F_given_repair is not None:
            out["p_F_given_repair"] = self.p_F_given_repair
        out.update(c_R_money=self.c_R_money, c_F_money=self.c_F_money, nde_cost_money=self.nde_cost_money)
        for key in ("x_th", "s_th_fixed"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        if self.experimental_designs:
            out["experimental_designs"] = {k: dict(v) for k, v in self.experimental_designs.items()}
        if self.root_bracket is not None:
            out["root_bracket"] = list(self.root_bracket)
        out["sweep"] = self.sweep.to_dict()
        if self.two_step is not None:
            out["two_step"] = self.two_step.to_dict()
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"

    def with_overrides(self, **changes) -> "ScenarioConfig":
        """Re-validated copy with top-level fields replaced."""
        raw = self.to_dict()
        raw.update({k: v for k, v in changes.items() if v is not None})
        return ScenarioConfig.from_dict(raw)

    # -- builders ------------------------------------------------------------

    @property
    def signal_orientation(self) -> SignalOrientation:
        return SignalOrientation(self.orientation)

    @property
    def binary_condition(self) -> bool:
        return self.prior_y1 is not None

    def prior(self) -> ContinuousDistribution:
        return from_dict(self.condition_prior)

    def designs(self) -> dict[str, ContinuousDistribution]:
        return {k: from_dict(v) for k, v in self.experimental_designs.items()}

    def nde_model(self):
        kind = self.nde["kind"]
        if kind == "base_model":
            m = self.nde["model"]
            return lognormal_polynomial_base(m["median_coefficients"], m["sigma_log"])
        if kind == "roc":
            return roc_given(from_dict(self.nde["y0"]), from_dict(self.nde["y1"]), self.prior_y1,
                             self.signal_orientation)
        return ConfusionMatrix(pod=self.nde["pod"], pfa=self.nde["pfa"])

    def failure_model(self) -> FailureModel:
        f = self.failure
        if f["kind"] == "lognormal_cdf":
            return lognormal_cdf_failure(f["floor"], f["mu_log"], f["sigma_log"], self.p_F_given_repair)
        return FailureModel.binary({A0: f["a0"], AR: f["aR"]})

    def one_step_problem(self) -> OneStepProblem:
        prior = BinaryPrior(self.prior_y1) if self.binary_condition else self.prior()
        bracket = Interval(*self.root_bracket) if self.root_bracket else None
        scale = "log" if bracket is not None and bracket.lo > 0 else "linear"
        return OneStepProblem(prior, self.nde_model(), self.failure_model(), self.c_R_money, self.c_F_money,
                              self.nde_cost_money, root_bracket=bracket, root_scale=scale)

    def two_step_problem(self, nde=None) -> TwoStepProblem:
        if self.two_step is None:
            raise ConfigError("two_step", "scenario has no two-step block")
        ts = self.two_step
        nde = self.nde_model() if nde is None else nde
        if isinstance(nde, RocModel):
            nde = nde.with_prior(ts.prior_y1)
        bracket = Interval(*self.root_bracket) if self.root_bracket else None
        return TwoStepProblem(ts.prior_y1, ts.transition, ts.c_R_money, ts.c_F_money, nde, root_bracket=bracket)


def load_scenario(name_or_path: str) -> ScenarioConfig:
    """Built-in scenario name or path to a JSON config."""
    from .scenarios import BUILTIN_NAMES, builtin

    if name_or_path in BUILTIN_NAMES or not Path(name_or_path).exists():
        return builtin(name_or_path)
    return ScenarioConfig.load(name_or_path)


__all__ = ["ScenarioConfig", "SweepConfig", "TwoStepConfig", "load_scenario"]
