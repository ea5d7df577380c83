"""Cluster connectivity checks and the lazy no-good re-optimisation loop."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .graph import Graph, connected_components
from .model import ClusterParams, Constraint, ModelIR, build_model, nogood_cut
from .solver import Solution, SolveLimits, SolverBackend, solve

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClusterConnectivity:
    cluster: int
    members: frozenset[int]
    connected: bool
    components: int


@dataclass(frozen=True)
class ConnectivityReport:
    per_cluster: tuple[ClusterConnectivity, ...]

    @property
    def nonempty(self) -> int:
        return sum(1 for c in self.per_cluster if c.members)

    @property
    def connected_count(self) -> int:
        return sum(1 for c in self.per_cluster if c.members and c.connected)

    @property
    def fraction_connected(self) -> float:
        """Connected share of the nonempty clusters (1.0 when all are empty)."""
        return self.connected_count / self.nonempty if self.nonempty else 1.0

    @property
    def all_connected(self) -> bool:
        return self.connected_count == self.nonempty

    def to_json(self) -> dict:
        return {
            "fraction_connected": self.fraction_connected,
            "clusters": [
                {"cluster": c.cluster, "members": sorted(c.members), "connected": c.connected,
                 "components": c.components}
                for c in self.per_cluster
            ],
        }


def check_connectivity(g: Graph, s: Solution, K: int | None = None) -> ConnectivityReport:
    per = []
    for c, members in enumerate(s.clusters(K)):
        comps = len(connected_components(g, members)) if members else 0
        per.append(ClusterConnectivity(c, frozenset(members), comps <= 1, comps))
    return ConnectivityReport(tuple(per))


@dataclass
class LazyResult:
    solution: Solution
    rounds_used: int
    report: ConnectivityReport
    history: list[Solution] = field(default_factory=list)
    cuts: list[Constraint] = field(default_factory=list)
    # "connected" | "max_rounds" | "no_solution"
    stop_reason: str = "connected"

    def __iter__(self):
        return iter((self.solution, self.rounds_used, self.report))

    @property
    def exhausted(self) -> bool:
        return self.stop_reason == "max_rounds"


def solve_with_lazy_connectivity(g: Graph, p: ClusterParams, limits: SolveLimits | None = None,
                                 backend: SolverBackend | str = "cbc", max_rounds: int = 10,
                                 model: ModelIR | None = None) -> LazyResult:
    """Re-solve with a no-good cut on each incumbent that has a disconnected cluster.

    Stops at the first incumbent whose clusters are all connected, after
    ``max_rounds`` solves, or when a cut leaves no solution (the last
    incumbent is returned in that case).
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    m = model if model is not None else build_model(g, p)
    history: list[Solution] = []
    cuts: list[Constraint] = []
    for rnd in range(1, max_rounds + 1):
        sol = solve(m, limits, backend)
        if not sol.status.has_solution:
            if not history:
                return LazyResult(sol, rnd, ConnectivityReport(()), history, cuts, "no_solution")
            last = history[-1]
            return LazyResult(last, rnd, check_connectivity(g, last, p.K), history, cuts, "no_solution")
        history.append(sol)
        report = check_connectivity(g, sol, p.K)
        if report.all_connected:
            return LazyResult(sol, rnd, report, history, cuts, "connected")
        if rnd == max_rounds:
            return LazyResult(sol, rnd, report, history, cuts, "max_rounds")
        cut = nogood_cut(sol.active(), name=f"nogood_{rnd}")
        log.info("round %d: %d disconnected cluster(s), adding %s",
                 rnd, report.nonempty - report.connected_count, cut.name)
        cuts.append(cut)
        m = m.with_constraints([cut])
    raise AssertionError("unreachable")
