"""Built-in scenarios and a brute-force discretized oracle.

``hypothetical``: lognormal echo amplitude whose median grows cubically with
crack size, exponential crack-size prior, lognormal-cdf failure curve.

``halfcell``: half-cell potential readings with normal likelihoods for
sound / corroded concrete, binary condition, one- and two-step variants.

The oracle replaces every integral by a sum over a joint (condition, signal)
mass table. Cells are quantile-spaced: cell edges sit at probability levels
Phi(z) for z evenly spaced on [-Z_SPAN, Z_SPAN], which resolves the tails
that dominate the cost integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy import special

from .bayes import BINARY_THETA, BinaryPrior
from .config import ScenarioConfig
from .decision import IntervalPolicy, OneStepProblem
from .errors import UnknownScenario
from .nde_models import BaseModel, RocModel
from .quadrature import Interval

Z_SPAN = 8.5

_HYPOTHETICAL = {
    "name": "hypothetical",
    "unit": "",
    "signal_unit": "",
    "condition_prior": {"kind": "exponential", "mean": 0.03},
    "nde": {
        "kind": "base_model",
        "model": {
            "kind": "lognormal_polynomial",
            "median_coefficients": [2.0, 1.0, 0.0, 1e-2 * math.exp(-0.5)],
            "sigma_log": 1.0,
        },
    },
    "orientation": "above",
    "failure": {"kind": "lognormal_cdf", "floor": 1e-5, "mu_log": 0.1, "sigma_log": 1.0},
    "p_F_given_repair": 1e-4,
    "c_R_money": 1.0,
    "c_F_money": 800.0,
    "nde_cost_money": 0.0,
    "x_th": 0.1,
    "s_th_fixed": 0.03,
    "experimental_designs": {
        "ED1": {"kind": "exponential", "mean": 0.03},
        "ED2": {"kind": "lognormal", "mu_log": -2.5, "sigma_log": 0.5},
        "ED3": {"kind": "uniform", "lo": 0.0, "hi": 0.5},
    },
    "root_bracket": [1e-6, 10.0],
    "sweep": {"bracket": [1e-3, 1.0], "scale": "log", "points": 241},
}

_HALFCELL = {
    "name": "halfcell",
    "unit": "M EUR",
    "signal_unit": "V",
    "prior_y1": 0.05,
    "nde": {
        "kind": "roc",
        "y0": {"kind": "normal", "mu": -0.207, "sigma": 0.0804},
        "y1": {"kind": "normal", "mu": -0.354, "sigma": 0.08},
    },
    "orientation": "below",
    "failure": {"kind": "binary", "a0": [0.0, 1.0], "aR": [0.0, 0.0]},
    "c_R_money": 5.0,
    "c_F_money": 50.0,
    "nde_cost_money": 0.0,
    "s_th_fixed": -0.2515,
    "root_bracket": [-40.0, 1.0],
    "sweep": {"bracket": [-0.6, 0.0], "scale": "linear", "points": 241},
    "two_step": {
        "prior_y1": 0.1,
        "transition": [[0.95, 0.05], [0.0, 1.0]],
        "c_R_money": 5.0,
        "c_F_money": 50.0,
        "s_th_fixed": -0.2515,
        "s_th_memoryless": -0.4,
        "sweep": {"bracket": [-0.6, 0.0], "scale": "linear", "points": 401},
    },
}

BUILTIN_NAMES = ("hypothetical", "halfcell")
_BUILTINS = {"hypothetical": _HYPOTHETICAL, "halfcell": _HALFCELL}


def builtin(name: str) -> ScenarioConfig:
    if name not in _BUILTINS:
        raise UnknownScenario(f"unknown scenario {name!r}; builtins are {', '.join(BUILTIN_NAMES)}")
    return ScenarioConfig.from_dict(_BUILTINS[name])


# -- oracle ------------------------------------------------------------------


@dataclass(frozen=True)
class OracleGrid:
    """Joint mass table ``mass[k, j]`` over condition nodes and signal cells."""

    x_nodes: np.ndarray
    s_nodes: np.ndarray
    s_edges: np.ndarray
    mass: np.ndarray

    def __post_init__(self):
        if np.any(self.mass < 0):
            raise ValueError("negative mass")
        if abs(self.mass.sum() - 1.0) > 1e-10:
            raise ValueError(f"mass sums to {self.mass.sum()!r}")


def _z_levels(n: int):
    z = np.linspace(-Z_SPAN, Z_SPAN, n + 1)
    return z, 0.5 * (z[:-1] + z[1:])


def _cell_masses(z: np.ndarray) -> np.ndarray:
    """``Phi(z[j+1]) - Phi(z[j])`` with the outer cells absorbing the tails."""
    lo, hi = z[:-1].copy(), z[1:].copy()
    lo[0], hi[-1] = -np.inf, np.inf
    return np.where(lo < 0, special.ndtr(hi) - special.ndtr(lo), special.ndtr(-lo) - special.ndtr(-hi))


def _conditional(problem: OneStepProblem):
    """(cdf, sf) of S given the condition, broadcasting over (s, x)."""
    nde = problem.nde
    if isinstance(nde, BaseModel):
        return nde.cdf, nde.sf
    if isinstance(nde, RocModel):
        if nde.dists is not None:
            d0, d1 = nde.dists
            return (lambda s, x: np.where(x > 0.5, d1.cdf(s), d0.cdf(s)),
                    lambda s, x: np.where(x > 0.5, d1.sf(s), d0.sf(s)))
        cdf = lambda s, x: np.where(x > 0.5, nde.cdf_y1(s), nde.cdf_y0(s))  # noqa: E731
        return cdf, lambda s, x: 1.0 - cdf(s, x)
    raise TypeError("oracle needs a continuous-signal problem")


def _bisect(f: Callable[[np.ndarray], np.ndarray], shape, bracket: Interval, log: bool) -> np.ndarray:
    """Vectorized bisection; ``f(s)`` is True where the target lies to the right of ``s``."""
    lo = np.full(shape, math.log(bracket.lo) if log else bracket.lo)
    hi = np.full(shape, math.log(bracket.hi) if log else bracket.hi)
    tr = np.exp if log else (lambda v: v)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        right = f(tr(mid))
        lo = np.where(right, mid, lo)
        hi = np.where(right, hi, mid)
        if np.all(hi - lo <= 1e-15 * np.maximum(1.0, np.abs(hi))):
            break
    return tr(0.5 * (lo + hi))


def _marginal_quantiles(cdf, sf, x_nodes, x_mass, z, bracket: Interval, log: bool) -> np.ndarray:
    """Signals where the discretized marginal of S reaches probability Phi(z)."""
    def marg(fn, s):
        return np.tensordot(x_mass, fn(s[None, :], x_nodes[:, None]), 1)

    lower = z < 0
    out = np.empty(z.shape)
    p_lo = special.ndtr(z[lower])
    q_hi = special.ndtr(-z[~lower])
    out[lower] = _bisect(lambda s: marg(cdf, s) < p_lo, p_lo.shape, bracket, log)
    out[~lower] = _bisect(lambda s: marg(sf, s) > q_hi, q_hi.shape, bracket, log)
    return out


def build_oracle_grid(problem: OneStepProblem, n_x: int = 400, n_s: int = 400,
                      bracket: Optional[Interval] = None) -> OracleGrid:
    """Quantile-spaced joint grid for a continuous-signal one-step problem.

    Condition cells hold prior mass; signal cells are bounded by quantiles of
    the discretized marginal of S, and each cell's conditional mass is an
    exact cdf (or sf) difference, so the table sums to one.
    """
    prior = problem.condition_prior
    if isinstance(prior, BinaryPrior):
        x_nodes, x_mass = BINARY_THETA.copy(), prior.weights
    else:
        zx, zx_mid = _z_levels(n_x)
        x_mass = _cell_masses(zx)
        low = zx_mid < 0
        x_nodes = np.empty(zx_mid.shape)
        x_nodes[low] = prior.quantile(special.ndtr(zx_mid[low]))
        x_nodes[~low] = prior.isf(special.ndtr(-zx_mid[~low]))
    cdf, sf = _conditional(problem)
    bracket = bracket or problem.search_bracket()
    log = bracket.lo > 0

    zs, zs_mid = _z_levels(n_s)
    inner = _marginal_quantiles(cdf, sf, x_nodes, x_mass, zs[1:-1], bracket, log)
    sup = problem.signal_support()
    s_edges = np.concatenate([[sup.lo], inner, [sup.hi]])
    s_nodes = _marginal_quantiles(cdf, sf, x_nodes, x_mass, zs_mid, bracket, log)
    c = cdf(s_edges[None, :], x_nodes[:, None])
    q = sf(s_edges[None, :], x_nodes[:, None])
    cell = np.where(c[:, :-1] < 0.5, c[:, 1:] - c[:, :-1], q[:, :-1] - q[:, 1:])
    cell = np.clip(cell, 0.0, None)
    cell /= cell.sum(axis=1, keepdims=True)
    return OracleGrid(x_nodes, s_nodes, s_edges, x_mass[:, None] * cell)


def oracle_expected_cost(
    grid: OracleGrid,
    problem: OneStepProblem,
    policy: Union[None, str, IntervalPolicy, Callable[[np.ndarray], np.ndarray]] = None,
) -> float:
    """Exhaustive sum of the expected cost over the discretized joint.

    ``policy``: None for the grid-optimal action per signal cell, ``"a0"`` or
    ``"aR"`` for a uniform action, or a repair predicate on signal values
    (evaluated at cell nodes).
    """
    w = problem.action_weights(grid.x_nodes)  # [k, a]
    j = grid.mass.T @ w  # [s, a]
    if policy is None:
        return float(j.min(axis=1).sum())
    if isinstance(policy, str):
        return float(j[:, 1 if policy == "aR" else 0].sum())
    rep = policy.repair(grid.s_nodes) if isinstance(policy, IntervalPolicy) else policy(grid.s_nodes)
    return float(np.where(rep, j[:, 1], j[:, 0]).sum())


__all__ = ["BUILTIN_NAMES", "OracleGrid", "build_oracle_grid", "builtin", "oracle_expected_cost"]
