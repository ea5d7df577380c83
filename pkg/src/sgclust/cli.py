"""Command-line entry point: ``sgclust {solve,generate,sweep,baseline,batch,validate}``.

Exit codes: 0 success, 1 solver/runtime error, 2 infeasible model or
invalid solution, 64 usage or parameter error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

from .analysis import (epsilon_sweep, ratio_objective_value, run_batch, validate_solution,
                       write_sweep_csv)
from .baselines import clique_percolation, maxmax
from .connectivity import solve_with_lazy_connectivity
from .graph import (GeneratorConfig, Graph, GraphError, generate_random, load_edge_list,
                    parse_class_name, transform_unit_weights)
from .model import ClusterParams, ModelError, Objective, build_model, emit_lp
from .solver import Solution, SolveLimits, SolverError, Status, get_backend, solve

EX_OK, EX_ERROR, EX_INFEASIBLE, EX_USAGE = 0, 1, 2, 64

log = logging.getLogger("sgclust")

PARAM_DEFAULTS = dict(K=3, mu=0.05, delta=0.2, nu=0.5, sigma=0.7)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _add_instance(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("instance (edge-list file or generator)")
    g.add_argument("--input", type=Path, help="edge-list file: 'i j [w]' per line")
    g.add_argument("--n", type=int)
    g.add_argument("--density", type=float)
    g.add_argument("--max-weight", type=int, default=50)
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--transform", action="store_true",
                   help="reweight edges by 1 + common neighbours (for unit-weight graphs)")


def _add_params(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model parameters")
    g.add_argument("--k", type=int, dest="K", help=f"clusters (default {PARAM_DEFAULTS['K']})")
    g.add_argument("--mu", type=float, help=f"minimum membership (default {PARAM_DEFAULTS['mu']})")
    g.add_argument("--delta", type=float, help=f"balance tolerance (default {PARAM_DEFAULTS['delta']})")
    g.add_argument("--nu", type=float, help=f"maximum overlap fraction (default {PARAM_DEFAULTS['nu']})")
    g.add_argument("--sigma", type=float, help=f"minimum total membership (default {PARAM_DEFAULTS['sigma']})")
    g.add_argument("--objective", choices=[o.value for o in Objective])
    g.add_argument("--assoc-lb", type=float, help="lower bound on total association")
    g.add_argument("--time-constraints", action="store_true", help="add arrival-time constraints")
    ms = g.add_mutually_exclusive_group()
    ms.add_argument("--min-size", dest="min_size", action="store_const", const=True)
    ms.add_argument("--no-min-size", dest="min_size", action="store_const", const=False)


def _add_solver(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("solver")
    g.add_argument("--backend", default="cbc", help="cbc, highs, or path to a CBC-compatible binary")
    g.add_argument("--time-limit", type=float, default=600.0)
    g.add_argument("--threads", type=int, default=1)
    g.add_argument("--gap", type=float, help="relative MIP gap target")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="sgclust", description="Soft graph clustering by mixed-integer programming")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("solve", help="build, solve, validate and report one instance")
    _add_instance(sp)
    _add_params(sp)
    _add_solver(sp)
    sp.add_argument("--lazy-connectivity", action="store_true")
    sp.add_argument("--max-rounds", type=int, default=10)
    sp.add_argument("--out", type=Path, default=Path("sgclust-out"))

    sp = sub.add_parser("generate", help="write a random instance as an edge list")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--density", type=float, required=True)
    sp.add_argument("--max-weight", type=int, required=True)
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--out", type=Path, help="output file (stdout if omitted)")

    sp = sub.add_parser("sweep", help="epsilon-constraint sweep between MinCut and MaxAssociation")
    _add_instance(sp)
    _add_params(sp)
    _add_solver(sp)
    sp.add_argument("--steps", type=int, default=10)
    sp.add_argument("--out", type=Path, default=Path("sgclust-out"))

    sp = sub.add_parser("baseline", help="run MaxMax or k-clique percolation")
    sp.add_argument("method", choices=["maxmax", "cpm"])
    _add_instance(sp)
    sp.add_argument("--k", type=int, default=3, dest="clique_k", help="clique size for cpm")
    sp.add_argument("--wstar", type=float, default=0.0, help="edge weight threshold for cpm")
    sp.add_argument("--out", type=Path, default=Path("sgclust-out"))

    sp = sub.add_parser("batch", help="run instance classes from a JSON manifest")
    sp.add_argument("--manifest", type=Path, required=True)
    _add_params(sp)
    _add_solver(sp)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--out", type=Path, default=Path("sgclust-out"))

    sp = sub.add_parser("validate", help="re-check a stored solution against an instance")
    _add_instance(sp)
    _add_params(sp)
    sp.add_argument("--solution", type=Path, required=True)
    sp.add_argument("--out", type=Path, help="write the report JSON here")
    return ap


def _graph(args) -> Graph:
    if args.input is not None and args.n is not None:
        raise UsageError("give either --input or generator flags, not both")
    if args.input is not None:
        g = load_edge_list(args.input.read_bytes())
    elif args.n is not None and args.density is not None:
        g = generate_random(GeneratorConfig(args.n, args.density, args.max_weight, args.seed))
    else:
        raise UsageError("an instance is required: --input FILE or --n/--density")
    return transform_unit_weights(g) if args.transform else g


def _params(args, base: dict | None = None) -> ClusterParams:
    vals = dict(PARAM_DEFAULTS)
    vals.update(base or {})
    for key in ("K", "mu", "delta", "nu", "sigma", "objective"):
        if getattr(args, key, None) is not None:
            vals[key] = getattr(args, key)
    if getattr(args, "assoc_lb", None) is not None:
        vals["assoc_lower_bound"] = args.assoc_lb
    if getattr(args, "time_constraints", False):
        vals["enable_time_constraints"] = True
    if getattr(args, "min_size", None) is not None:
        vals["enable_min_size"] = args.min_size
    return ClusterParams(**vals)


def _limits(args) -> SolveLimits:
    return SolveLimits(args.time_limit, args.gap, args.threads)


def params_to_json(p: ClusterParams) -> dict:
    d = asdict(p)
    d["objective"] = p.objective.value
    return d


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, default=str) + "\n")


def cmd_solve(args) -> int:
    g = _graph(args)
    p = _params(args)
    p.check_graph(g)
    m = build_model(g, p)
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    backend = get_backend(args.backend)
    extra = {}
    if args.lazy_connectivity:
        res = solve_with_lazy_connectivity(g, p, _limits(args), backend, args.max_rounds, model=m)
        sol = res.solution
        extra = {"rounds_used": res.rounds_used, "stop_reason": res.stop_reason}
        m = m.with_constraints(res.cuts)
        (out / "model.lp").write_text(emit_lp(m))
    else:
        sol = backend.solve(m, _limits(args), workdir=out)
    _write_json(out / "solution.json", {"instance": {"n": g.n, "m": g.m}, "params": params_to_json(p),
                                        "solution": sol.to_json(), **extra})
    if not sol.status.has_solution:
        print(f"status: {sol.status.value}")
        return EX_INFEASIBLE if sol.status is Status.INFEASIBLE else EX_ERROR
    rep = validate_solution(g, p, sol)
    _write_json(out / "report.json", rep.to_json())
    print(f"status: {sol.status.value}  objective: {sol.objective:.6g}  gap: {sol.mip_gap:.4g}  "
          f"r: {rep.ratio_r:.4f}  connected: {100 * rep.connectivity.fraction_connected:.2f}%")
    for c, members in enumerate(sol.clusters(p.K)):
        print(f"  cluster {c}: " + " ".join(f"{i}:{sol.x[(i, c)]:.3g}" for i in sorted(members)))
    if not rep.ok:
        for v in rep.violations:
            print(f"  violation {v}", file=sys.stderr)
    return EX_OK


def cmd_generate(args) -> int:
    g = generate_random(GeneratorConfig(args.n, args.density, args.max_weight, args.seed))
    text = g.to_edge_list()
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text)
    return EX_OK


def cmd_sweep(args) -> int:
    g = _graph(args)
    p = _params(args)
    p.check_graph(g)
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    backend = get_backend(args.backend)
    rows = epsilon_sweep(g, p, _limits(args), backend, args.steps)
    args.out.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(rows, args.out / "sweep.csv")
    for r in rows:
        print(f"{r.kind:9s} j={r.j:<3d} status={r.status:10s} cut={r.total_cut} assoc={r.total_assoc}")
    return EX_OK


def cmd_baseline(args) -> int:
    g = _graph(args)
    res = maxmax(g) if args.method == "maxmax" else clique_percolation(g, args.clique_k, args.wstar)
    args.out.mkdir(parents=True, exist_ok=True)
    _write_json(args.out / f"baseline_{args.method}.json", res.to_json())
    for c, members in enumerate(res.clusters):
        print(f"cluster {c}: {' '.join(map(str, sorted(members)))}")
    return EX_OK


def load_manifest(path: Path) -> tuple[list[GeneratorConfig], dict, dict]:
    data = json.loads(path.read_text())
    seeds = data.get("seeds", [1, 2, 3, 4, 5])
    configs = []
    for entry in data["classes"]:
        if isinstance(entry, str):
            n, d, mw = parse_class_name(entry)
        else:
            n, d, mw = entry["n"], entry["density"], entry["max_weight"]
        configs += [GeneratorConfig(n, d, mw, s) for s in seeds]
    return configs, data.get("params", {}), data


def cmd_batch(args) -> int:
    try:
        configs, base, data = load_manifest(args.manifest)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"bad manifest {args.manifest}: {exc}") from exc
    p = _params(args, base)
    objectives = data.get("objectives") or [p.objective.value]
    res = run_batch(configs, p, _limits(args), get_backend(args.backend), objectives, args.jobs)
    res.write(args.out)
    for s in res.stats:
        opt = "-" if s.opt_mean is None else f"{s.opt_mean:.3f}"
        print(f"{s.cls:14s} {s.objective:9s} {s.counts:7s} opt={opt} gap={s.gap_mean} r={s.r_mean} "
              f"con={s.con_percent}")
    return EX_OK


def cmd_validate(args) -> int:
    g = _graph(args)
    data = json.loads(args.solution.read_text())
    inst = data.get("instance", {})
    if inst.get("n") is not None and inst["n"] != g.n:
        raise SolverError(f"solution is for n={inst['n']}, instance has n={g.n}")
    stored = dict(data.get("params", {}))
    p = _params(args, stored)
    sol = Solution.from_json(data.get("solution", data))
    rep = validate_solution(g, p, sol)
    if args.out:
        _write_json(args.out, rep.to_json())
    if rep.ok:
        print(f"valid: total_cut={rep.total_cut:.6g} total_assoc={rep.total_assoc:.6g} "
              f"r={rep.ratio_r:.4f} ratio_sum={ratio_objective_value(rep):.4f}")
        return EX_OK
    for v in rep.violations:
        print(f"violation {v}")
    return EX_INFEASIBLE


COMMANDS = {"solve": cmd_solve, "generate": cmd_generate, "sweep": cmd_sweep,
            "baseline": cmd_baseline, "batch": cmd_batch, "validate": cmd_validate}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ModelError, GraphError) as exc:
        print(f"sgclust: error: {exc}", file=sys.stderr)
        return EX_USAGE
    except (SolverError, OSError, ValueError) as exc:
        print(f"sgclust: error: {exc}", file=sys.stderr)
        return EX_ERROR


if __name__ == "__main__":
    sys.exit(main())
