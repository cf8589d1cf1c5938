"""Hypothetical crack-size example: all four quality models plus the design study.

    python scripts/example1_hypothetical.py [--out results/hypothetical]

Prints the prior decision, the optimal cost for every quality model and the
perceived/effective costs under the three experimental designs, and writes
the threshold sweeps as CSV.
"""

import argparse
from pathlib import Path

from ndevoi import builtin
from ndevoi.decision import (
    calibrate_threshold,
    experimental_design_report,
    fixed_threshold_problem,
    optimal_policy,
    preposterior_cost,
    prior_optimal,
    solve_one_step,
)
from ndevoi.export import write_csv
from ndevoi.verification import model3_problem


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/hypothetical")
    args = ap.parse_args()
    out = Path(args.out)

    cfg = builtin("hypothetical")
    p1 = cfg.one_step_problem()
    action, c0 = prior_optimal(p1)
    print(f"prior: {action}, C_0 = {c0:.4f}\n")

    print(solve_one_step(p1).to_text("[model 1: continuous signal, continuous condition]"), "\n")

    sweep = cfg.sweep
    cal2 = calibrate_threshold(p1, sweep.interval(), sweep.points, scale=sweep.scale)
    q = fixed_threshold_problem(p1, 0.03)
    ce2 = preposterior_cost(q, optimal_policy(q))
    print(f"[model 2: PoD curve] s_th=0.03 -> C_e={ce2:.4f}; optimum s_th={cal2.s_th:.4g}, C_e={cal2.cost:.4f}\n")
    write_csv(out / "sweep_model2.csv", ["s_th", "cost", "a_I0", "a_I1"], cal2.curve)

    p3 = model3_problem(cfg)
    print(solve_one_step(p3).to_text(f"[model 3: ROC, x_th={cfg.x_th}]"), "\n")
    cal4 = calibrate_threshold(p3, sweep.interval(), sweep.points, scale=sweep.scale)
    print(f"[model 4: confusion matrix] optimum s_th={cal4.s_th:.4g}, C_e={cal4.cost:.4f}\n")
    write_csv(out / "sweep_model4.csv", ["s_th", "cost", "a_I0", "a_I1"], cal4.curve)

    print("[experimental designs]  s_th   perceived  effective")
    rows = experimental_design_report(p1, cfg.x_th, cfg.designs(), sweep.interval(), sweep.points,
                                      scale=sweep.scale)
    for r in rows:
        print(f"  {r.name:<4} {r.s_th:9.3g} {r.perceived_cost:10.3f} {r.effective_cost:10.3f}")
    write_csv(out / "expdesign.csv", ["design", "s_th", "perceived", "effective"],
              [(r.name, r.s_th, r.perceived_cost, r.effective_cost) for r in rows])
    print(f"\nCSV written to {out}/")


if __name__ == "__main__":
    main()
