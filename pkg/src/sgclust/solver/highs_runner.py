"""Solve an LP file with HiGHS and write a CBC-style solution file.

Usage: python -m sgclust.solver.highs_runner MODEL.lp PARAMS.txt OUT.sol

Exit status 0 when HiGHS ran (whatever the model status), 1 when the model
could not be read or solved.
"""

import sys

import highspy


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 3:
        print(__doc__, file=sys.stderr)
        return 1
    model, params, out = argv
    h = highspy.Highs()
    if h.readOptions(params) != highspy.HighsStatus.kOk:
        print(f"bad options file {params}", file=sys.stderr)
        return 1
    if h.readModel(model) == highspy.HighsStatus.kError:
        print(f"cannot read model {model}", file=sys.stderr)
        return 1
    h.run()
    status = h.getModelStatus()
    info = h.getInfo()
    MS = highspy.HighsModelStatus
    has_sol = info.primal_solution_status == 2  # kSolutionStatusFeasible
    if status == MS.kOptimal:
        head = "Optimal"
    elif status in (MS.kInfeasible, MS.kUnboundedOrInfeasible):
        head = "Infeasible"
    else:
        # time/iteration/gap limits; objective 1e50 marks "no incumbent"
        head = "Stopped on time"
    obj = info.objective_function_value if has_sol else 1e50
    lines = [f"{head} - objective value {obj:.10f}"]
    if has_sol and head != "Infeasible":
        names = h.getLp().col_names_
        for k, (name, v) in enumerate(zip(names, h.getSolution().col_value)):
            if abs(v) > 1e-12:
                lines.append(f"{k:7d} {name:<24s} {v:.12g} 0")
    with open(out, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    gap = info.mip_gap if has_sol else float("inf")
    print(f"Result - {h.modelStatusToString(status)}")
    print(f"Gap: {gap:.10g}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
