from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field

from ..model import ModelIR

INT_TOL = 1e-6
FEAS_TOL = 1e-6


class SolverError(RuntimeError):
    pass


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNKNOWN = "unknown"

    @property
    def has_solution(self) -> bool:
        return self in (Status.OPTIMAL, Status.FEASIBLE)


@dataclass(frozen=True)
class SolveLimits:
    time_limit: float = 600.0
    mip_gap_target: float | None = None
    threads: int = 1

    def __post_init__(self) -> None:
        if self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        if self.threads < 1:
            raise ValueError("threads must be positive")


@dataclass
class Solution:
    status: Status
    objective: float = math.nan
    mip_gap: float = 0.0
    y: dict[tuple[int, int], int] = field(default_factory=dict)
    x: dict[tuple[int, int], float] = field(default_factory=dict)
    solve_seconds: float = 0.0
    values: dict[str, float] = field(default_factory=dict, repr=False)
    backend: str = ""

    def clusters(self, K: int | None = None) -> list[set[int]]:
        if K is None:
            K = 1 + max((c for _, c in self.y), default=-1)
        out: list[set[int]] = [set() for _ in range(K)]
        for (i, c), v in self.y.items():
            if v:
                out[c].add(i)
        return out

    def active(self) -> set[tuple[int, int]]:
        return {key for key, v in self.y.items() if v}

    def to_json(self) -> dict:
        return {
            "status": self.status.value,
            "objective": None if math.isnan(self.objective) else self.objective,
            "mip_gap": self.mip_gap,
            "solve_seconds": self.solve_seconds,
            "backend": self.backend,
            "y": [[i, c, v] for (i, c), v in sorted(self.y.items())],
            "x": [[i, c, v] for (i, c), v in sorted(self.x.items())],
            "values": dict(sorted(self.values.items())),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Solution":
        obj = data.get("objective")
        return cls(
            status=Status(data["status"]),
            objective=math.nan if obj is None else float(obj),
            mip_gap=float(data.get("mip_gap", 0.0)),
            y={(int(i), int(c)): int(v) for i, c, v in data.get("y", [])},
            x={(int(i), int(c)): float(v) for i, c, v in data.get("x", [])},
            solve_seconds=float(data.get("solve_seconds", 0.0)),
            values={k: float(v) for k, v in data.get("values", {}).items()},
            backend=data.get("backend", ""),
        )


def memberships_from_values(values: dict[str, float], n: int, K: int) -> tuple[dict, dict]:
    """Rounded y and clamped x maps over all ``(i, c)`` from raw variable values."""
    ys, xs = {}, {}
    for i in range(n):
        for c in range(K):
            yv = values.get(f"y_{i}_{c}", 0.0)
            r = round(yv)
            if abs(yv - r) > INT_TOL or r not in (0, 1):
                raise SolverError(f"y_{i}_{c}={yv} is not integral")
            ys[(i, c)] = int(r)
            xv = values.get(f"x_{i}_{c}", 0.0)
            if xv < -1e-9 or xv > 1 + 1e-9:
                raise SolverError(f"x_{i}_{c}={xv} outside [0, 1]")
            xs[(i, c)] = min(1.0, max(0.0, xv))
    return ys, xs


_HEADER = re.compile(r"^(?P<status>.*?)\s*-\s*objective value\s+(?P<obj>\S+)", re.I)


def _status_from_header(text: str) -> Status:
    low = text.lower()
    if "infeasible" in low:
        return Status.INFEASIBLE
    if low.startswith("optimal"):
        return Status.OPTIMAL
    if low.startswith("stopped"):
        return Status.FEASIBLE
    return Status.UNKNOWN


def parse_solution_file(text: str, m: ModelIR, gap: float | None = None) -> Solution:
    """Parse a CBC-style solution file against the variables of ``m``.

    First line ``<status> - objective value <v>``; then one line per nonzero
    variable: ``<index> <name> <value> <reduced cost>``, optionally prefixed
    by ``**``. Variables not listed are zero.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise SolverError("empty solution file")
    head = _HEADER.match(lines[0].strip())
    if not head:
        raise SolverError(f"unrecognised solution header {lines[0]!r}")
    status = _status_from_header(head.group("status"))
    try:
        objective = float(head.group("obj"))
    except ValueError:
        raise SolverError(f"bad objective value in {lines[0]!r}") from None
    values: dict[str, float] = {}
    for ln in lines[1:]:
        parts = ln.replace("**", " ").split()
        if len(parts) < 3:
            raise SolverError(f"malformed solution line {ln!r}")
        name = parts[1]
        if name not in m.var_index:
            raise SolverError(f"unknown variable {name!r} in solution file")
        try:
            values[name] = float(parts[2])
        except ValueError:
            raise SolverError(f"malformed value in {ln!r}") from None
    if status is Status.INFEASIBLE:
        return Solution(Status.INFEASIBLE)
    if status is Status.FEASIBLE and not values and abs(objective) >= 1e49:
        return Solution(Status.UNKNOWN)
    ys, xs = memberships_from_values(values, m.n, m.K)
    for v in m.variables:
        if v.kind == "binary" and v.name in values:
            values[v.name] = float(round(values[v.name]))
    sol = Solution(status, objective, 0.0, ys, xs, values=values)
    if status is Status.FEASIBLE:
        sol.mip_gap = math.inf if gap is None else gap
    elif gap is not None:
        sol.mip_gap = gap
    return sol
