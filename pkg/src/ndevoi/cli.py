"""Command-line front end.

    ndevoi <command> --scenario <name|path> [--out DIR] [--xth X] [--sth S] [--grid N] [--tol REL]

Commands: pod, roc, decide, expdesign, twostep, verify, export.
Exit status: 0 success, 1 verification or solver failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import export
from .config import ScenarioConfig, load_scenario
from .decision import (
    action_costs,
    calibrate_threshold,
    cost_surface,
    evidence_density,
    experimental_design_report,
    fixed_threshold_problem,
    optimal_policy,
    solve_one_step,
)
from .errors import ConfigError, NdeVoiError, UnknownScenario
from .nde_models import (
    BaseModel,
    RocModel,
    detection_masses,
    pod_curve_from_base,
    roc_curve_trace,
    roc_from_base,
    roc_indices,
)
from .twostep import fixed_point_costs, history_table, memoryless_policy_cost, two_step_solve, zone_map
from .verification import load_manifest, model3_problem, run_checks

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _grid(lo: float, hi: float, n: int, scale: str) -> np.ndarray:
    return np.geomspace(lo, hi, n) if scale == "log" else np.linspace(lo, hi, n)


def _emit(out: Path, name: str, text: str) -> None:
    export.atomic_write_text(out / name, text)
    print(f"wrote {out / name}")


def _load(args) -> ScenarioConfig:
    cfg = load_scenario(args.scenario)
    overrides = {}
    if args.xth is not None:
        overrides["x_th"] = args.xth
    if args.sth is not None:
        overrides["s_th_fixed"] = args.sth
    return cfg.with_overrides(**overrides) if overrides else cfg


def _require_base(cfg: ScenarioConfig, command: str) -> None:
    if cfg.nde["kind"] != "base_model":
        raise ConfigError("nde.kind", f"'{command}' needs a base_model scenario")


# -- commands ------------------------------------------------------------------


def cmd_pod(cfg: ScenarioConfig, args) -> int:
    _require_base(cfg, "pod")
    base = cfg.nde_model()
    prior = cfg.prior()
    n = args.grid or 201
    xs = np.linspace(0.0, float(prior.isf(1e-3)), n)
    thresholds = [cfg.s_th_fixed] if cfg.s_th_fixed is not None else []
    thresholds += [s for s in _grid(*cfg.sweep.bracket, 5, cfg.sweep.scale) if s not in thresholds]
    out = Path(args.out)
    for k, s in enumerate(thresholds):
        curve = pod_curve_from_base(base, s, cfg.signal_orientation)
        name = "pod_curve.csv" if k == 0 else f"pod_curve_sth_{k}.csv"
        export.write_csv(out / name, ["x", "pod"], curve.tabulate(xs), export.TRACE)
        print(f"wrote {out / name} (s_th={s:g})")
    return EXIT_OK


def _rocs(cfg: ScenarioConfig):
    if cfg.nde["kind"] == "roc":
        return {"roc": cfg.nde_model()}
    _require_base(cfg, "roc")
    if cfg.x_th is None:
        raise ConfigError("x_th", "needed to derive a ROC model (use --xth)")
    base, prior = cfg.nde_model(), cfg.prior()
    rocs = {"roc": roc_from_base(base, cfg.x_th, prior, prior, cfg.signal_orientation)}
    for name, d in cfg.designs().items():
        rocs[f"roc_{name}"] = roc_from_base(base, cfg.x_th, d, prior, cfg.signal_orientation)
    return rocs


def cmd_roc(cfg: ScenarioConfig, args) -> int:
    out = Path(args.out)
    summary = {}
    for name, roc in _rocs(cfg).items():
        trace = roc_curve_trace(roc, args.grid or 201)
        export.write_csv(out / f"{name}.csv", ["s_th", "pfa", "pod"], trace, export.TRACE)
        idx = roc_indices(roc)
        summary[name] = {"auc": idx.auc, "youden_s_th": idx.youden[0], "youden_index": idx.youden[1],
                         "corner_s_th": idx.closest_to_corner[0], "corner_distance": idx.closest_to_corner[1]}
        print(f"{name}: AUC={idx.auc:.6g}  Youden s_th={idx.youden[0]:.6g} (J={idx.youden[1]:.6g})  "
              f"closest-to-corner s_th={idx.closest_to_corner[0]:.6g}")
    _emit(out, "roc_indices.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def _sweep_rows(cal):
    return [(s, c, a0, a1) for s, c, a0, a1 in cal.curve]


def cmd_decide(cfg: ScenarioConfig, args) -> int:
    out = Path(args.out)
    unit = cfg.unit
    p = cfg.one_step_problem()
    reports = {}
    sweep_points = args.grid or cfg.sweep.points
    bracket = cfg.sweep.interval()
    if isinstance(p.nde, BaseModel):
        reports["model1_continuous"] = solve_one_step(p, unit)
        cal = calibrate_threshold(p, bracket, sweep_points, scale=cfg.sweep.scale, orientation=cfg.signal_orientation)
        export.write_csv(out / "sweep_model2.csv", ["s_th", "cost", "action_I0", "action_I1"], _sweep_rows(cal))
        if cfg.s_th_fixed is not None:
            q = fixed_threshold_problem(p, cfg.s_th_fixed, cfg.signal_orientation)
            reports["model2_fixed_threshold"] = solve_one_step(q, unit)
    p3 = model3_problem(cfg)
    reports["model3_binary_condition"] = solve_one_step(p3, unit)
    cal = calibrate_threshold(p3, bracket, sweep_points, scale=cfg.sweep.scale)
    export.write_csv(out / "sweep_model4.csv", ["s_th", "cost", "action_I0", "action_I1"], _sweep_rows(cal))
    if cfg.s_th_fixed is not None:
        reports["model4_fixed_threshold"] = solve_one_step(fixed_threshold_problem(p3, cfg.s_th_fixed), unit)

    # conditional expected costs of each action given the signal
    s_grid = _grid(*cfg.sweep.bracket, sweep_points, cfg.sweep.scale)
    for name, prob in (("model1", p), ("model3", p3)):
        if not prob.continuous_signal or (name == "model1" and not isinstance(p.nde, BaseModel)):
            continue
        j = action_costs(prob, s_grid)
        ev = evidence_density(prob, s_grid)
        pol = optimal_policy(prob)
        rows = [(s, j0 / e, jr / e, "aR" if r else "a0")
                for s, j0, jr, e, r in zip(s_grid, j[:, 0], j[:, 1], ev, pol.repair(s_grid))]
        export.write_csv(out / f"posterior_costs_{name}.csv", ["s", "cost_a0", "cost_aR", "action"], rows)

    n = args.grid or 51
    axis = np.linspace(0.0, 1.0, n)
    surf = cost_surface(p3, axis, axis)
    export.write_csv(out / "cost_surface.csv", ["pfa", "pod", "cost", "action_I0", "action_I1", "zone"], surf.rows())

    text = "\n\n".join(r.to_text(f"[{k}]") for k, r in reports.items()) + "\n"
    print(text, end="")
    _emit(out, "report.txt", text)
    _emit(out, "report.json", json.dumps({k: r.to_dict() for k, r in reports.items()}, indent=2) + "\n")
    return EXIT_OK


def cmd_expdesign(cfg: ScenarioConfig, args) -> int:
    _require_base(cfg, "expdesign")
    if not cfg.experimental_designs:
        raise ConfigError("experimental_designs", "no designs configured")
    rows = experimental_design_report(cfg.one_step_problem(), cfg.x_th, cfg.designs(), cfg.sweep.interval(),
                                      args.grid or cfg.sweep.points, scale=cfg.sweep.scale,
                                      orientation=cfg.signal_orientation)
    out = Path(args.out)
    export.write_csv(out / "expdesign.csv",
                     ["design", "s_th", "perceived_cost", "effective_cost", "action_I0", "action_I1"],
                     [(r.name, r.s_th, r.perceived_cost, r.effective_cost, str(r.policy.on_no_detection),
                       str(r.policy.on_detection)) for r in rows])
    for r in rows:
        export.write_csv(out / f"expdesign_sweep_{r.name}.csv", ["s_th", "cost", "action_I0", "action_I1"],
                         list(r.curve))
    print(f"{'design':<8}{'s_th*':>14}{'perceived':>14}{'effective':>14}")
    for r in rows:
        print(f"{r.name:<8}{r.s_th:>14.6g}{r.perceived_cost:>14.6g}{r.effective_cost:>14.6g}")
    return EXIT_OK


def cmd_twostep(cfg: ScenarioConfig, args) -> int:
    if cfg.two_step is None:
        raise ConfigError("two_step", "scenario has no two-step block")
    ts = cfg.two_step
    prob = cfg.two_step_problem()
    out = Path(args.out)
    results = {}
    if isinstance(prob.nde, RocModel):
        cont = two_step_solve(prob, "continuous")
        results["continuous"] = cont
        lo, hi = ts.sweep.bracket if ts.sweep else cfg.sweep.bracket
        rows = history_table(prob, cont.value_table, np.linspace(lo, hi, args.grid or 121))
        export.write_csv(out / "twostep_history.csv", ["s1", "a1", "belief_y2", "s2_lo", "s2_hi"],
                         [(s, str(a), b, bd[0] if bd else float("nan"), bd[-1] if bd else float("nan"))
                          for s, a, b, bd in rows])
        export.write_csv(out / "twostep_value.csv", ["belief", "v2"], list(cont.curve), export.TRACE)
    s_fixed = args.sth if args.sth is not None else ts.s_th_fixed
    if s_fixed is not None or not isinstance(prob.nde, RocModel):
        results["fixed_point"] = two_step_solve(prob, "fixed_point", s_th=s_fixed)
    if ts.sweep is not None and isinstance(prob.nde, RocModel):
        op = two_step_solve(prob, "optimize_point", bracket=ts.sweep.interval(), grid_points=ts.sweep.points)
        results["optimized_point"] = op
        grid = _grid(*ts.sweep.bracket, args.grid or ts.sweep.points, ts.sweep.scale)
        pfa, pod = detection_masses(prob.nde, grid)
        opt = fixed_point_costs(prob, pfa, pod)
        mem = [memoryless_policy_cost(prob, fa, d) for fa, d in zip(pfa, pod)]
        export.write_csv(out / "twostep_sweep.csv", ["s_th", "pfa", "pod", "cost_optimal", "cost_memoryless"],
                         list(zip(grid, pfa, pod, opt, mem)))
    if ts.s_th_memoryless is not None and isinstance(prob.nde, RocModel):
        results["memoryless_threshold"] = two_step_solve(prob, "fixed_point", s_th=ts.s_th_memoryless)
    n = args.grid or 51
    axis = np.linspace(0.0, 1.0, n)
    zones = zone_map(prob, axis, axis)
    export.write_csv(out / "twostep_zones.csv", ["pfa", "pod", "zone"],
                     [(fa, d, int(zones[j, k])) for j, d in enumerate(axis) for k, fa in enumerate(axis)])
    text = "\n\n".join(f"[{k}]\n{r.to_text()}" for k, r in results.items()) + "\n"
    print(text, end="")
    _emit(out, "twostep_report.txt", text)
    _emit(out, "twostep_report.json", json.dumps({k: r.to_dict() for k, r in results.items()}, indent=2) + "\n")
    return EXIT_OK


def cmd_verify(cfg: ScenarioConfig, args) -> int:
    checks = [c for c in load_manifest() if c.scenario == cfg.name]
    if not checks:
        print(f"no reference checks for scenario {cfg.name!r}")
        return EXIT_FAIL
    results = run_checks(cfg, checks, args.tol)
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    if args.out:
        lines = [r.line() for r in results]
        export.atomic_write_text(Path(args.out) / f"verify_{cfg.name}.txt", "\n".join(lines) + "\n")
    return EXIT_OK if failed == 0 else EXIT_FAIL


def cmd_export(cfg: ScenarioConfig, args) -> int:
    _emit(Path(args.out), f"{cfg.name}.json", cfg.to_json())
    return EXIT_OK


COMMANDS = {
    "pod": cmd_pod,
    "roc": cmd_roc,
    "decide": cmd_decide,
    "expdesign": cmd_expdesign,
    "twostep": cmd_twostep,
    "verify": cmd_verify,
    "export": cmd_export,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ndevoi", description="Value of information of NDE systems.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--scenario", required=True, help="builtin name (hypothetical, halfcell) or JSON path")
        sp.add_argument("--out", default=None if name == "verify" else "out", help="output directory")
        sp.add_argument("--xth", type=float, default=None, help="critical condition threshold x_th")
        sp.add_argument("--sth", type=float, default=None, help="fixed signal threshold s_th")
        sp.add_argument("--grid", type=int, default=None, help="points per sweep / grid axis")
        sp.add_argument("--tol", type=float, default=None, help="relative tolerance override for verify")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.grid is not None and args.grid < 3:
        print("config error: --grid: expected an integer >= 3", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = _load(args)
        return COMMANDS[args.command](cfg, args)
    except (ConfigError, UnknownScenario) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NdeVoiError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
