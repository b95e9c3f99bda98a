#!/usr/bin/env python3
"""Solve exported LP files with HiGHS (highspy).

  milp_crosscheck.py solve MODEL.lp          print `name value` lines
  milp_crosscheck.py compare DIR             every DIR/*.lp against DIR/*.cost

A .cost file holds the solver's optimal cost or the word "infeasible".
`compare` prints one line per model and exits nonzero on any mismatch
beyond 1e-6 relative.
"""

import pathlib
import sys

import highspy


def solve(path):
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 0.0)
    h.setOptionValue("mip_abs_gap", 0.0)
    h.setOptionValue("primal_feasibility_tolerance", 1e-9)
    h.setOptionValue("mip_feasibility_tolerance", 1e-9)
    if h.readModel(str(path)) != highspy.HighsStatus.kOk:
        raise RuntimeError(f"cannot read {path}")
    h.run()
    status = h.getModelStatus()
    if status == highspy.HighsModelStatus.kInfeasible:
        return None, {}
    if status != highspy.HighsModelStatus.kOptimal:
        raise RuntimeError(f"{path}: {h.modelStatusToString(status)}")
    lp = h.getLp()
    values = h.getSolution().col_value
    names = [lp.col_names_[i] for i in range(lp.num_col_)]
    return h.getInfo().objective_function_value, dict(zip(names, values))


def cmd_solve(path):
    objective, values = solve(path)
    if objective is None:
        print("# infeasible")
        return 0
    print(f"# objective {objective!r}")
    for name in sorted(values):
        v = values[name]
        if name.startswith(("x_", "g_", "w_")):
            v = round(v)
        print(f"{name} {v!r}")
    return 0


def cmd_compare(directory):
    failures = 0
    models = sorted(pathlib.Path(directory).glob("*.lp"))
    for lp in models:
        expected = lp.with_suffix(".cost").read_text().split()[0]
        objective, _ = solve(lp)
        if expected == "infeasible":
            ok = objective is None
        else:
            want = float(expected)
            ok = objective is not None and abs(objective - want) <= 1e-6 * max(1.0, abs(want))
        failures += not ok
        print(f"{lp.stem} expected {expected} highs {objective} {'ok' if ok else 'MISMATCH'}")
    print(f"{len(models) - failures}/{len(models)} match")
    return 1 if failures or not models else 0


def main(argv):
    if len(argv) == 3 and argv[1] == "solve":
        return cmd_solve(argv[2])
    if len(argv) == 3 and argv[1] == "compare":
        return cmd_compare(argv[2])
    print(__doc__, file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main(sys.argv))
