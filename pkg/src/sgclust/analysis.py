"""Solution validation, cut/association metrics, the epsilon sweep and batch runs.

Everything here is recomputed from the memberships ``(y, x)`` and the graph;
the model rows are never consulted, so the validator is an independent
check of both the formulation and the solver.
"""

from __future__ import annotations

import csv
import itertools
import json
import logging
import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import model as names
from .connectivity import ConnectivityReport, check_connectivity
from .graph import GeneratorConfig, Graph, generate_random
from .model import ClusterParams, Objective, build_model
from .solver import FEAS_TOL, Solution, SolveLimits, SolverBackend, SolverError, Status, solve

log = logging.getLogger(__name__)

FAMILY_NAMES = {
    "a": "membership",
    "b": "vertex-in-some-cluster",
    "c": "equal balance",
    "d": "overlap cardinality",
    "e": "intersection indicators",
    "f": "cut indicators",
    "g": "cut linearization",
    "h": "association indicators",
    "i": "connectivity",
    "j": "time constraints",
    "35": "minimum cluster size",
    "assoc_lb": "association lower bound",
}


@dataclass(frozen=True)
class Violation:
    family: str
    constraint: str
    slack: float

    def __str__(self) -> str:
        return f"[{self.family}] {self.constraint}: violated by {self.slack:.6g}"


@dataclass
class ClusterReport:
    kappa: dict[tuple[int, int], float]
    assoc: dict[int, float]
    total_cut: float
    total_assoc: float
    ratio_r: float
    balance_ok: bool
    overlap_ok: bool
    membership_ok: bool
    connectivity: ConnectivityReport
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def families_violated(self) -> set[str]:
        return {v.family for v in self.violations}

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "total_cut": self.total_cut,
            "total_assoc": self.total_assoc,
            "ratio_r": _json_num(self.ratio_r),
            "ratio_objective": _json_num(ratio_objective_value(self)),
            "kappa": [[c1, c2, v] for (c1, c2), v in sorted(self.kappa.items())],
            "assoc": [[c, v] for c, v in sorted(self.assoc.items())],
            "balance_ok": self.balance_ok,
            "overlap_ok": self.overlap_ok,
            "membership_ok": self.membership_ok,
            "connectivity": self.connectivity.to_json(),
            "violations": [asdict(v) for v in self.violations],
        }


def _json_num(v: float):
    return None if math.isinf(v) or math.isnan(v) else v


def cut_and_association(g: Graph, K: int, y: dict, x: dict):
    """Inter-cluster cut per ordered pair and association per cluster."""
    sets = [{i for i in range(g.n) if y.get((i, c), 0)} for c in range(K)]
    kappa = {(c1, c2): 0.0 for c1, c2 in itertools.permutations(range(K), 2)}
    assoc = {c: 0.0 for c in range(K)}
    for i, j, w in g.edges:
        for c1, c2 in kappa:
            if i in sets[c1] and j in sets[c2]:
                both = sets[c1] & sets[c2]
                if not (i in both and j in both):
                    kappa[(c1, c2)] += w * (x.get((i, c1), 0.0) + x.get((j, c2), 0.0))
        for c in range(K):
            if i in sets[c] and j in sets[c]:
                assoc[c] += w * (x.get((i, c), 0.0) + x.get((j, c), 0.0))
    return kappa, assoc


def ratio(total_cut: float, total_assoc: float) -> float:
    if total_assoc > 0:
        return total_cut / total_assoc
    return 0.0 if total_cut <= FEAS_TOL else math.inf


def ratio_objective_value(report: ClusterReport) -> float:
    """Sum over ordered cluster pairs of kappa(c1, c2) / (A(c1) + A(c2)).

    0/0 pairs count 0; a positive cut over zero association gives inf.
    """
    total = 0.0
    for (c1, c2), k in report.kappa.items():
        den = report.assoc[c1] + report.assoc[c2]
        if den > 0:
            total += k / den
        elif k > FEAS_TOL:
            return math.inf
    return total


def validate_solution(g: Graph, p: ClusterParams, s: Solution, tol: float = FEAS_TOL) -> ClusterReport:
    """Check every constraint family against ``s`` and compute its metrics.

    y/x level families are always checked; auxiliary families (indicator
    and linearization variables, time constraints) only when ``s.values``
    carries the raw solver values.
    """
    if not s.y:
        raise ValueError("solution carries no memberships")
    n, K = g.n, p.K
    for (i, c) in s.y:
        if not (0 <= i < n and 0 <= c < K):
            raise ValueError(f"membership ({i},{c}) outside instance with n={n}, K={K}")
    yv = {(i, c): int(s.y.get((i, c), 0)) for i in range(n) for c in range(K)}
    xv = {(i, c): float(s.x.get((i, c), 0.0)) for i in range(n) for c in range(K)}
    vals = s.values
    out: list[Violation] = []

    def need(cond_excess: float, family: str, name: str) -> None:
        if cond_excess > tol:
            out.append(Violation(family, name, cond_excess))

    def close(actual: float, expected: float, family: str, name: str) -> None:
        need(abs(actual - expected), family, name)

    sets = [frozenset(i for i in range(n) if yv[(i, c)]) for c in range(K)]

    for i in range(n):
        for c in range(K):
            need(xv[(i, c)] - yv[(i, c)], "a", f"mlink_{i}_{c}")
            need(p.mu * yv[(i, c)] - xv[(i, c)], "a", f"mmin_{i}_{c}")
    for i in range(n):
        in_any = max(yv[(i, c)] for c in range(K))
        lv = vals.get(names.L(i), in_any) if vals else in_any
        for c in range(K):
            need(yv[(i, c)] - lv, "b", f"ylink_{i}_{c}")
        need(lv - sum(yv[(i, c)] for c in range(K)), "b", f"lcov_{i}")
        close(sum(xv[(i, c)] for c in range(K)), lv, "b", f"msum_{i}")

    mass = [sum(xv[(i, c)] for i in range(n)) for c in range(K)]
    for c1, c2 in itertools.permutations(range(K), 2):
        need((1 - p.delta) * mass[c1] - mass[c2], "c", f"bal_lo_{c1}_{c2}")
        need(mass[c2] - (1 + p.delta) * mass[c1], "c", f"bal_hi_{c1}_{c2}")

    for c1, c2 in itertools.combinations(range(K), 2):
        shared = len(sets[c1] & sets[c2])
        need(shared - p.nu * len(sets[c1]), "d", f"ovcap1_{c1}_{c2}")
        need(shared - p.nu * len(sets[c2]), "d", f"ovcap2_{c1}_{c2}")

    if vals:
        _check_auxiliaries(g, p, yv, xv, sets, vals, need, close)

    for c in range(K):
        members = sets[c]
        inside = [e for e, (i, j, _) in enumerate(g.edges) if i in members and j in members]
        if vals and any(names.gam(c, e) in vals for e in range(g.m)):
            for e, (i, j, _) in enumerate(g.edges):
                gv = vals.get(names.gam(c, e), 0.0)
                need(gv - yv[(i, c)], "i", f"gam2_{c}_{e}")
                need(gv - yv[(j, c)], "i", f"gam3_{c}_{e}")
            spans = sum(vals.get(names.gam(c, e), 0.0) for e in range(g.m))
        else:
            spans = len(inside)
        need(len(members) - 1 - spans, "i", f"span_{c}")
        for i in members:
            if not any(j in members for j in g.neighbors(i)):
                out.append(Violation("i", f"deg_{i}_{c}", 1.0))

    if p.enable_time_constraints and vals:
        for i in range(n):
            tv = vals.get(names.tt(i), 0.0)
            need(-tv, "j", f"tt_lb_{i}")
            need(tv - n, "j", f"tt_ub_{i}")
        for c in range(K):
            for e, (i, j, _) in enumerate(g.edges):
                gv = vals.get(names.gam(c, e), 0.0)
                diff = vals.get(names.tt(j), 0.0) - vals.get(names.tt(i), 0.0)
                need(-(n + 1) * (1 - gv) + 1 - diff, "j", f"time1_{c}_{e}")
                need(diff - 1 - n * (1 - gv), "j", f"time2_{c}_{e}")

    if p.min_size_active:
        need(p.sigma * n - sum(yv.values()), "35", "minsize")

    kappa, assoc = cut_and_association(g, K, yv, xv)
    total_cut, total_assoc = sum(kappa.values()), sum(assoc.values())
    if p.assoc_lower_bound is not None:
        need(p.assoc_lower_bound - total_assoc, "assoc_lb", "assoc_lb")

    fams = {v.family for v in out}
    return ClusterReport(
        kappa=kappa, assoc=assoc, total_cut=total_cut, total_assoc=total_assoc,
        ratio_r=ratio(total_cut, total_assoc),
        balance_ok="c" not in fams, overlap_ok="d" not in fams,
        membership_ok=not ({"a", "b"} & fams),
        connectivity=check_connectivity(g, Solution(Status.OPTIMAL, y=yv), K),
        violations=out,
    )


def _check_auxiliaries(g, p, yv, xv, sets, vals, need, close) -> None:
    """Indicator variables must equal the products they stand for."""
    K = p.K
    for c1, c2 in itertools.combinations(range(K), 2):
        for i in range(g.n):
            close(vals.get(names.t(i, c1, c2), 0.0), yv[(i, c1)] * yv[(i, c2)], "d", f"ovl_{i}_{c1}_{c2}")
    for e, (i, j, w) in enumerate(g.edges):
        for c1, c2 in itertools.combinations(range(K), 2):
            both = sets[c1] & sets[c2]
            close(vals.get(names.eta(e, c1, c2), 0.0), float(i in both and j in both), "e",
                  f"eta_{e}_{c1}_{c2}")
        for c1, c2 in itertools.permutations(range(K), 2):
            both = sets[c1] & sets[c2]
            cut = float(i in sets[c1] and j in sets[c2] and not (i in both and j in both))
            close(vals.get(names.s(e, c1, c2), 0.0), cut, "f", f"cut_{e}_{c1}_{c2}")
            # products are checked against the true indicator so each family is judged on its own
            close(vals.get(names.taui(e, c1, c2), 0.0), xv[(i, c1)] * cut, "g", f"taui_{e}_{c1}_{c2}")
            close(vals.get(names.tauj(e, c1, c2), 0.0), xv[(j, c2)] * cut, "g", f"tauj_{e}_{c1}_{c2}")
        for c in range(K):
            inside = float(i in sets[c] and j in sets[c])
            close(vals.get(names.z(c, e), 0.0), inside, "h", f"asc_{c}_{e}")
            close(vals.get(names.pii(c, e), 0.0), xv[(i, c)] * inside, "h", f"pii_{c}_{e}")
            close(vals.get(names.pij(c, e), 0.0), xv[(j, c)] * inside, "h", f"pij_{c}_{e}")


# ---------------------------------------------------------------- sweep


@dataclass
class SweepRow:
    kind: str  # "mincut" | "epsilon" | "maxassoc"
    j: int
    bound: float | None
    status: str
    objective: float | None
    total_cut: float | None
    total_assoc: float | None
    ratio_sum: float | None
    ratio_r: float | None

    @property
    def feasible(self) -> bool:
        return self.total_cut is not None


SWEEP_FIELDS = ["kind", "j", "bound", "status", "objective", "total_cut", "total_assoc",
                "ratio_sum", "ratio_r"]


def _row(kind, j, bound, g, p, sol) -> SweepRow:
    if not sol.status.has_solution:
        return SweepRow(kind, j, bound, sol.status.value, None, None, None, None, None)
    rep = validate_solution(g, p, sol)
    return SweepRow(kind, j, bound, sol.status.value, sol.objective, rep.total_cut,
                    rep.total_assoc, ratio_objective_value(rep), rep.ratio_r)


def epsilon_sweep(g: Graph, p: ClusterParams, limits: SolveLimits | None = None,
                  backend: SolverBackend | str = "cbc", steps: int = 10) -> list[SweepRow]:
    """Cut/association trade-off: MinCut, then MinCut under rising association bounds.

    Rows: the plain MinCut optimum (j=0, its association is w1), then for
    j = 1..steps MinCut with total association >= (j/steps)(w2 - w1), and
    last the MaxAssociation optimum (its objective is w2). Both endpoint
    models share the minimum-size setting of ``p`` so every row is
    optimised over the same clusterings.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    base = p.with_(objective=Objective.MIN_CUT, assoc_lower_bound=None,
                   enable_min_size=p.min_size_active if p.objective is Objective.MIN_CUT
                   else p.enable_min_size)
    base = base.with_(enable_min_size=base.min_size_active)
    first = solve(build_model(g, base), limits, backend)
    rows = [_row("mincut", 0, None, g, base, first)]
    top_p = base.with_(objective=Objective.MAX_ASSOCIATION)
    top = solve(build_model(g, top_p), limits, backend)
    top_row = _row("maxassoc", steps + 1, None, g, top_p, top)
    if rows[0].total_assoc is None or top_row.objective is None:
        raise SolverError("sweep endpoints could not be solved")
    w1, w2 = rows[0].total_assoc, top_row.objective
    for j in range(1, steps + 1):
        bound = (j / steps) * (w2 - w1)
        pj = base.with_(assoc_lower_bound=max(0.0, bound))
        sol = solve(build_model(g, pj), limits, backend)
        rows.append(_row("epsilon", j, bound, g, pj, sol))
    rows.append(top_row)
    return rows


def write_sweep_csv(rows: Sequence[SweepRow], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(SWEEP_FIELDS)
        for r in rows:
            wr.writerow([_cell(getattr(r, f)) for f in SWEEP_FIELDS])


def _cell(v):
    if v is None:
        return "-"
    if isinstance(v, float):
        return "inf" if math.isinf(v) else f"{v:.6f}"
    return v


# ---------------------------------------------------------------- batch


@dataclass
class InstanceRow:
    cls: str
    seed: int
    objective: str
    status: str
    opt_seconds: float | None
    gap: float | None
    r: float | None
    con_percent: float | None
    objective_value: float | None = None
    connected_clusters: int = 0
    nonempty_clusters: int = 0
    error: str = ""


INSTANCE_FIELDS = ["cls", "seed", "objective", "status", "opt_seconds", "gap", "r", "con_percent",
                   "objective_value", "error"]


@dataclass
class ClassStats:
    cls: str
    objective: str
    instances: int
    solved: int
    unsolved: int
    opt_mean: float | None
    opt_std: float | None
    gap_mean: float | None
    gap_std: float | None
    r_mean: float | None
    r_std: float | None
    con_percent: float | None

    @property
    def counts(self) -> str:
        return f"({self.solved}/{self.unsolved})"


STATS_FIELDS = ["cls", "objective", "instances", "solved", "unsolved", "opt_mean", "opt_std",
                "gap_mean", "gap_std", "r_mean", "r_std", "con_percent"]


def _mean_std(vals: list[float]) -> tuple[float | None, float | None]:
    if not vals:
        return None, None
    # sample standard deviation; a single value reports 0
    return statistics.fmean(vals), statistics.stdev(vals) if len(vals) > 1 else 0.0


def class_stats(cls: str, objective: str, rows: Sequence[InstanceRow]) -> ClassStats:
    """Opt time over proven-optimal instances, gap over the rest, r and Con over all with a solution."""
    solved = [r for r in rows if r.status == Status.OPTIMAL.value]
    unsolved = [r for r in rows if r.status != Status.OPTIMAL.value]
    opt = _mean_std([r.opt_seconds for r in solved])
    gaps = [r.gap for r in unsolved if r.gap is not None and math.isfinite(r.gap)]
    gap = _mean_std(gaps) if unsolved else (0.0, 0.0)
    rs = _mean_std([r.r for r in rows if r.r is not None and math.isfinite(r.r)])
    nonempty = sum(r.nonempty_clusters for r in rows)
    con = 100.0 * sum(r.connected_clusters for r in rows) / nonempty if nonempty else None
    return ClassStats(cls, objective, len(rows), len(solved), len(unsolved), *opt, *gap, *rs, con)


def run_instance(cfg: GeneratorConfig, p: ClusterParams, limits: SolveLimits | None,
                 backend: SolverBackend | str, workdir: Path | None = None) -> InstanceRow:
    obj = p.objective.value
    try:
        g = generate_random(cfg)
        sol = solve(build_model(g, p), limits, backend, workdir)
    except Exception as exc:  # recorded, never fatal for the batch
        log.warning("instance %s seed %d failed: %s", cfg.name, cfg.seed, exc)
        return InstanceRow(cfg.name, cfg.seed, obj, "error", None, None, None, None, error=str(exc))
    if not sol.status.has_solution:
        return InstanceRow(cfg.name, cfg.seed, obj, sol.status.value, None, None, None, None)
    rep = validate_solution(g, p, sol)
    con = rep.connectivity
    return InstanceRow(
        cfg.name, cfg.seed, obj, sol.status.value, sol.solve_seconds, sol.mip_gap,
        rep.ratio_r, 100.0 * con.fraction_connected, sol.objective,
        con.connected_count, con.nonempty,
        "" if rep.ok else "; ".join(map(str, rep.violations[:3])),
    )


@dataclass
class BatchResult:
    rows: list[InstanceRow]
    stats: list[ClassStats]

    def write(self, outdir: str | Path) -> None:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        _write_csv(outdir / "instances.csv", INSTANCE_FIELDS, self.rows)
        _write_csv(outdir / "stats.csv", STATS_FIELDS, self.stats)
        (outdir / "stats.json").write_text(json.dumps(
            {"instances": [asdict(r) for r in self.rows], "classes": [asdict(s) for s in self.stats]},
            indent=2, default=_json_default))


def _json_default(v):
    return None if isinstance(v, float) and not math.isfinite(v) else str(v)


def _write_csv(path: Path, fields: list[str], items) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(fields)
        for it in items:
            wr.writerow([_cell(getattr(it, f)) for f in fields])


def run_batch(configs: Iterable[GeneratorConfig], p: ClusterParams, limits: SolveLimits | None = None,
              backend: SolverBackend | str = "cbc",
              objectives: Sequence[Objective | str] | None = None, jobs: int = 1) -> BatchResult:
    """Generate, solve and summarise every instance; failures become rows, not exceptions."""
    configs = list(configs)
    objs = [Objective(o) for o in objectives] if objectives else [p.objective]
    tasks = [(cfg, p.with_(objective=o)) for o in objs for cfg in configs]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda a: run_instance(a[0], a[1], limits, backend), tasks))
    else:
        rows = [run_instance(cfg, pp, limits, backend) for cfg, pp in tasks]
    stats = []
    for o in objs:
        seen: dict[str, list[InstanceRow]] = {}
        for r in rows:
            if r.objective == o.value:
                seen.setdefault(r.cls, []).append(r)
        stats += [class_stats(cls, o.value, rs) for cls, rs in seen.items()]
    return BatchResult(rows, stats)
