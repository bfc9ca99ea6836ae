#!/usr/bin/env python3
"""External MILP backend for `sjs --backend external` using HiGHS (highspy).

    sjs solve inst.json --backend external \
        --solver-cmd "python3 tools/highs_solve.py {model} {solution} {time_limit}"

Reads a fixed-format MPS model and writes the solution grammar expected by
the sjs external adapter (STATUS / OBJECTIVE / BOUND / one column per line).
An optional --start file in the same grammar seeds the search.
"""
import argparse
import math
import sys

import highspy


def read_values(path):
    values = {}
    with open(path) as f:
        for line in f:
            line = line.split("#", 1)[0].split()
            if len(line) == 2 and line[0] not in ("STATUS", "OBJECTIVE", "BOUND"):
                values[line[0]] = float(line[1])
    return values


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("model")
    ap.add_argument("solution")
    ap.add_argument("time_limit", nargs="?", type=float, default=math.inf)
    ap.add_argument("--start")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--verbose", action="store_true")
    args = ap.parse_args()

    h = highspy.Highs()
    h.setOptionValue("output_flag", args.verbose)
    h.setOptionValue("threads", args.threads)
    if math.isfinite(args.time_limit):
        h.setOptionValue("time_limit", args.time_limit)
    if h.readModel(args.model) != highspy.HighsStatus.kOk:
        print(f"cannot read {args.model}", file=sys.stderr)
        return 1
    lp = h.getLp()
    names = list(lp.col_names_)

    if args.start:
        start = read_values(args.start)
        sol = highspy.HighsSolution()
        sol.col_value = [start.get(n, 0.0) for n in names]
        sol.value_valid = True
        h.setSolution(sol)

    h.run()
    status = h.getModelStatus()
    info = h.getInfo()
    has_sol = info.primal_solution_status == 2  # kSolutionStatusFeasible
    if status == highspy.HighsModelStatus.kOptimal:
        tag = "OPTIMAL"
    elif status == highspy.HighsModelStatus.kInfeasible:
        tag = "INFEASIBLE"
    elif has_sol:
        tag = "TIME_LIMIT"
    else:
        tag = "INFEASIBLE" if status != highspy.HighsModelStatus.kTimeLimit else "TIME_LIMIT"

    with open(args.solution, "w") as out:
        out.write(f"STATUS {tag}\n")
        if tag == "INFEASIBLE" or not has_sol:
            return 0
        out.write(f"BOUND {info.mip_dual_bound!r}\n")
        values = h.getSolution().col_value
        integral = list(lp.integrality_) if lp.integrality_ else [None] * len(names)
        for name, v, kind in zip(names, values, integral):
            if kind == highspy.HighsVarType.kInteger and abs(v - round(v)) < 1e-6:
                v = float(round(v))
            out.write(f"{name} {v!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
