"""Half-cell potential example: one-step ROC decision and the two-step problem.

    python scripts/example2_halfcell.py [--out results/halfcell]
"""

import argparse
from pathlib import Path

import numpy as np

from ndevoi import builtin
from ndevoi.decision import calibrate_threshold, fixed_threshold_problem, optimal_policy, preposterior_cost, solve_one_step
from ndevoi.export import write_csv
from ndevoi.nde_models import roc_indices
from ndevoi.twostep import history_table, two_step_solve


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/halfcell")
    args = ap.parse_args()
    out = Path(args.out)

    cfg = builtin("halfcell")
    p = cfg.one_step_problem()
    report = solve_one_step(p, unit=cfg.unit)
    print(report.to_text("[one step, continuous potential]"), "\n")

    idx = roc_indices(p.nde)
    yq = fixed_threshold_problem(p, idx.youden[0])
    print(f"AUC={idx.auc:.3f}; Youden cut-off {idx.youden[0]:.4f} V -> C_e="
          f"{preposterior_cost(yq, optimal_policy(yq)):.3f} {cfg.unit}")
    cal = calibrate_threshold(p, cfg.sweep.interval(), cfg.sweep.points)
    print(f"optimal fixed threshold {cal.s_th:.4f} V -> C_e={cal.cost:.3f} {cfg.unit}")
    fq = fixed_threshold_problem(p, cfg.s_th_fixed)
    ce_fixed = preposterior_cost(fq, optimal_policy(fq))
    print(f"threshold {cfg.s_th_fixed} V -> C_e={ce_fixed:.3f} {cfg.unit} "
          f"({100 * (ce_fixed / report.expected_cost - 1):.1f}% above the continuous optimum)\n")

    prob = cfg.two_step_problem()
    ts = cfg.two_step
    cont = two_step_solve(prob, "continuous")
    print("[two steps, continuous]\n" + cont.to_text(), "\n")
    fixed = two_step_solve(prob, "fixed_point", s_th=ts.s_th_fixed)
    print(f"[two steps, fixed point s_th={ts.s_th_fixed}]\n" + fixed.to_text(), "\n")
    opt = two_step_solve(prob, "optimize_point", bracket=ts.sweep.interval(), grid_points=ts.sweep.points)
    print("[two steps, optimized fixed point]\n" + opt.to_text(), "\n")
    mem = two_step_solve(prob, "fixed_point", s_th=ts.s_th_memoryless)
    print(f"s_th={ts.s_th_memoryless}: memoryless {mem.memoryless_cost:.3f} vs optimized actions "
          f"{mem.expected_cost:.3f} {cfg.unit}")

    rows = history_table(prob, cont.value_table, np.linspace(*ts.sweep.bracket, 121))
    write_csv(out / "twostep_history.csv", ["s1", "a1", "belief_y2", "s2_lo", "s2_hi"],
              [(s, str(a), b, bd[0] if bd else float("nan"), bd[-1] if bd else float("nan"))
               for s, a, b, bd in rows])
    write_csv(out / "twostep_sweep.csv", ["s_th", "cost"], opt.curve)
    print(f"\nCSV written to {out}/")


if __name__ == "__main__":
    main()
