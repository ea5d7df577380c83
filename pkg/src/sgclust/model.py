"""MILP for soft graph clustering, as a solver-agnostic IR plus LP-format text.

Variable naming (``e`` is the edge's position in ``Graph.edges``)::

    y_i_c, x_i_c, L_i            membership indicator, proportion, "in some cluster"
    t_i_c1_c2                    i in both c1 and c2            (c1 < c2)
    eta_e_c1_c2                  both endpoints in c1 and c2    (c1 < c2)
    s_e_c1_c2                    edge cut from c1 to c2         (ordered, c1 != c2)
    taui_e_c1_c2, tauj_e_c1_c2   x_i,c1 * s and x_j,c2 * s
    z_c_e, pii_c_e, pij_c_e      edge inside c, x_i,c * z, x_j,c * z
    gam_c_e                      span indicator
    tt_i                         arrival time (time constraints only)
"""

from __future__ import annotations

import enum
import hashlib
import itertools
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .graph import Graph


class ModelError(ValueError):
    pass


class Objective(str, enum.Enum):
    MIN_CUT = "mincut"
    MAX_ASSOCIATION = "maxassoc"


@dataclass(frozen=True)
class ClusterParams:
    K: int = 3
    mu: float = 0.05
    delta: float = 0.2
    nu: float = 0.5
    sigma: float = 0.7
    objective: Objective = Objective.MIN_CUT
    assoc_lower_bound: float | None = None
    enable_time_constraints: bool = False
    # None: on for MinCut, off for MaxAssociation
    enable_min_size: bool | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "objective", Objective(self.objective))
        if self.K < 2:
            raise ModelError(f"K must be >= 2, got {self.K}")
        for label in ("mu", "delta", "nu", "sigma"):
            v = getattr(self, label)
            if not 0.0 < v < 1.0:
                raise ModelError(f"{label} must lie strictly between 0 and 1, got {v}")
        if self.assoc_lower_bound is not None and self.assoc_lower_bound < 0:
            raise ModelError("assoc_lower_bound must be non-negative")

    @property
    def min_size_active(self) -> bool:
        if self.enable_min_size is None:
            return self.objective is Objective.MIN_CUT
        return self.enable_min_size

    def check_graph(self, g: Graph) -> None:
        if self.K > g.n:
            raise ModelError(f"K={self.K} exceeds vertex count {g.n}")

    def with_(self, **changes) -> "ClusterParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str  # "binary" | "continuous"
    lo: float = 0.0
    hi: float = 1.0


@dataclass(frozen=True)
class Constraint:
    name: str
    terms: tuple[tuple[str, float], ...]
    sense: str  # "<=", "=", ">="
    rhs: float
    family: str = ""

    def activity(self, values: dict[str, float]) -> float:
        return sum(coef * values.get(var, 0.0) for var, coef in self.terms)

    def violation(self, values: dict[str, float]) -> float:
        """Amount by which ``values`` violate the row (0 when satisfied)."""
        lhs = self.activity(values)
        if self.sense == "<=":
            return max(0.0, lhs - self.rhs)
        if self.sense == ">=":
            return max(0.0, self.rhs - lhs)
        return abs(lhs - self.rhs)


@dataclass(frozen=True)
class ModelIR:
    n: int
    K: int
    variables: tuple[Variable, ...]
    constraints: tuple[Constraint, ...]
    sense: str  # "min" | "max"
    objective: tuple[tuple[str, float], ...]
    var_index: dict[str, Variable] = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self) -> None:
        index = {}
        for v in self.variables:
            if v.name in index:
                raise ModelError(f"duplicate variable {v.name}")
            index[v.name] = v
        object.__setattr__(self, "var_index", index)

    def with_constraints(self, extra: Iterable[Constraint]) -> "ModelIR":
        extra = tuple(extra)
        names = {c.name for c in self.constraints}
        for c in extra:
            if c.name in names:
                raise ModelError(f"duplicate constraint {c.name}")
            for var, _ in c.terms:
                if var not in self.var_index:
                    raise ModelError(f"constraint {c.name} references unknown variable {var}")
        return ModelIR(self.n, self.K, self.variables, self.constraints + extra,
                       self.sense, self.objective)

    def family_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for c in self.constraints:
            out[c.family] = out.get(c.family, 0) + 1
        return out

    def objective_value(self, values: dict[str, float]) -> float:
        return sum(coef * values.get(var, 0.0) for var, coef in self.objective)


def y(i, c): return f"y_{i}_{c}"
def x(i, c): return f"x_{i}_{c}"
def L(i): return f"L_{i}"
def t(i, c1, c2): return f"t_{i}_{min(c1, c2)}_{max(c1, c2)}"
def eta(e, c1, c2): return f"eta_{e}_{min(c1, c2)}_{max(c1, c2)}"
def s(e, c1, c2): return f"s_{e}_{c1}_{c2}"
def taui(e, c1, c2): return f"taui_{e}_{c1}_{c2}"
def tauj(e, c1, c2): return f"tauj_{e}_{c1}_{c2}"
def z(c, e): return f"z_{c}_{e}"
def pii(c, e): return f"pii_{c}_{e}"
def pij(c, e): return f"pij_{c}_{e}"
def gam(c, e): return f"gam_{c}_{e}"
def tt(i): return f"tt_{i}"


class _Builder:
    def __init__(self) -> None:
        self.variables: list[Variable] = []
        self.constraints: list[Constraint] = []

    def var(self, name: str, kind: str = "binary", lo: float = 0.0, hi: float = 1.0) -> None:
        self.variables.append(Variable(name, kind, lo, hi))

    def row(self, family: str, name: str, terms: Sequence[tuple[str, float]], sense: str, rhs: float) -> None:
        self.constraints.append(Constraint(name, tuple(terms), sense, float(rhs), family))


def build_model(g: Graph, p: ClusterParams) -> ModelIR:
    """Assemble the full clustering MILP for ``g`` under ``p``."""
    if g.m < 1:
        raise ModelError("graph has no edges")
    p.check_graph(g)
    n, K = g.n, p.K
    V = range(n)
    C = range(K)
    E = list(enumerate(g.edges))
    upairs = list(itertools.combinations(C, 2))
    opairs = list(itertools.permutations(C, 2))
    b = _Builder()

    for i in V:
        for c in C:
            b.var(y(i, c))
    for i in V:
        for c in C:
            b.var(x(i, c), "continuous")
    for i in V:
        b.var(L(i))
    for i in V:
        for c1, c2 in upairs:
            b.var(t(i, c1, c2))
    for e, _ in E:
        for c1, c2 in upairs:
            b.var(eta(e, c1, c2))
    for e, _ in E:
        for c1, c2 in opairs:
            b.var(s(e, c1, c2))
            b.var(taui(e, c1, c2), "continuous")
            b.var(tauj(e, c1, c2), "continuous")
    for c in C:
        for e, _ in E:
            b.var(z(c, e))
            b.var(pii(c, e), "continuous")
            b.var(pij(c, e), "continuous")
            b.var(gam(c, e))
    if p.enable_time_constraints:
        for i in V:
            b.var(tt(i), "continuous", 0.0, float(n))

    # (a) membership
    for i in V:
        for c in C:
            b.row("a", f"mlink_{i}_{c}", [(x(i, c), 1), (y(i, c), -1)], "<=", 0)
            b.row("a", f"mmin_{i}_{c}", [(x(i, c), 1), (y(i, c), -p.mu)], ">=", 0)
    # (b) L_i = 1 iff i is in some cluster; proportions sum to L_i
    for i in V:
        for c in C:
            b.row("b", f"ylink_{i}_{c}", [(y(i, c), 1), (L(i), -1)], "<=", 0)
        b.row("b", f"lcov_{i}", [(L(i), 1)] + [(y(i, c), -1) for c in C], "<=", 0)
        b.row("b", f"msum_{i}", [(x(i, c), 1) for c in C] + [(L(i), -1)], "=", 0)
    # (c) equal balance, both sides, every ordered pair
    for c1, c2 in opairs:
        b.row("c", f"bal_lo_{c1}_{c2}",
              [(x(i, c1), 1 - p.delta) for i in V] + [(x(i, c2), -1) for i in V], "<=", 0)
        b.row("c", f"bal_hi_{c1}_{c2}",
              [(x(i, c2), 1) for i in V] + [(x(i, c1), -(1 + p.delta)) for i in V], "<=", 0)
    # (d) overlap indicators and cardinality; t is symmetric in (c1, c2)
    for c1, c2 in upairs:
        for i in V:
            b.row("d", f"ovl1_{i}_{c1}_{c2}", [(y(i, c1), 1), (y(i, c2), 1), (t(i, c1, c2), -1)], "<=", 1)
            b.row("d", f"ovl2_{i}_{c1}_{c2}", [(t(i, c1, c2), 1), (y(i, c1), -1)], "<=", 0)
            b.row("d", f"ovl3_{i}_{c1}_{c2}", [(t(i, c1, c2), 1), (y(i, c2), -1)], "<=", 0)
        shared = [(t(i, c1, c2), 1) for i in V]
        b.row("d", f"ovcap1_{c1}_{c2}", shared + [(y(i, c1), -p.nu) for i in V], "<=", 0)
        b.row("d", f"ovcap2_{c1}_{c2}", shared + [(y(i, c2), -p.nu) for i in V], "<=", 0)
    # (e) both edge endpoints in the intersection
    for e, (i, j, _) in E:
        for c1, c2 in upairs:
            h = eta(e, c1, c2)
            b.row("e", f"eta1_{e}_{c1}_{c2}", [(t(i, c1, c2), 1), (t(j, c1, c2), 1), (h, -1)], "<=", 1)
            b.row("e", f"eta2_{e}_{c1}_{c2}", [(h, 1), (t(i, c1, c2), -1)], "<=", 0)
            b.row("e", f"eta3_{e}_{c1}_{c2}", [(h, 1), (t(j, c1, c2), -1)], "<=", 0)
    # (f) cut indicators (a_ij = 1 on edges, folded into the rhs)
    for e, (i, j, _) in E:
        for c1, c2 in opairs:
            sv, h = s(e, c1, c2), eta(e, c1, c2)
            b.row("f", f"cut1_{e}_{c1}_{c2}", [(y(i, c1), 1), (y(j, c2), 1), (h, -1), (sv, -1)], "<=", 1)
            b.row("f", f"cut2_{e}_{c1}_{c2}", [(sv, 1), (y(i, c1), -1)], "<=", 0)
            b.row("f", f"cut3_{e}_{c1}_{c2}", [(sv, 1), (y(j, c2), -1)], "<=", 0)
            b.row("f", f"cut4_{e}_{c1}_{c2}", [(sv, 1)], "<=", 1)
            b.row("f", f"cut5_{e}_{c1}_{c2}", [(sv, 1), (h, 1)], "<=", 1)
    # (g) tau = x * s
    for e, (i, j, _) in E:
        for c1, c2 in opairs:
            sv = s(e, c1, c2)
            for tag, tv, xv in (("taui", taui(e, c1, c2), x(i, c1)), ("tauj", tauj(e, c1, c2), x(j, c2))):
                b.row("g", f"{tag}1_{e}_{c1}_{c2}", [(tv, 1), (xv, -1)], "<=", 0)
                b.row("g", f"{tag}2_{e}_{c1}_{c2}", [(tv, 1), (sv, -1)], "<=", 0)
                b.row("g", f"{tag}3_{e}_{c1}_{c2}", [(tv, 1), (sv, -1), (xv, -1)], ">=", -1)
    # (h) association indicators and pi = x * z
    for c in C:
        for e, (i, j, _) in E:
            zv = z(c, e)
            b.row("h", f"asc1_{c}_{e}", [(y(i, c), 1), (y(j, c), 1), (zv, -1)], "<=", 1)
            b.row("h", f"asc2_{c}_{e}", [(zv, 1), (y(i, c), -1)], "<=", 0)
            b.row("h", f"asc3_{c}_{e}", [(zv, 1), (y(j, c), -1)], "<=", 0)
            b.row("h", f"asc4_{c}_{e}", [(zv, 1)], "<=", 1)
            for tag, pv, xv in (("pii", pii(c, e), x(i, c)), ("pij", pij(c, e), x(j, c))):
                b.row("h", f"{tag}1_{c}_{e}", [(pv, 1), (xv, -1)], "<=", 0)
                b.row("h", f"{tag}2_{c}_{e}", [(pv, 1), (zv, -1)], "<=", 0)
                b.row("h", f"{tag}3_{c}_{e}", [(pv, 1), (zv, -1), (xv, -1)], ">=", -1)
    # (i) necessary conditions for connected clusters
    for c in C:
        for e, (i, j, _) in E:
            gv = gam(c, e)
            b.row("i", f"gam1_{c}_{e}", [(gv, 1)], "<=", 1)
            b.row("i", f"gam2_{c}_{e}", [(gv, 1), (y(i, c), -1)], "<=", 0)
            b.row("i", f"gam3_{c}_{e}", [(gv, 1), (y(j, c), -1)], "<=", 0)
        b.row("i", f"span_{c}", [(y(i, c), 1) for i in V] + [(gam(c, e), -1) for e, _ in E], "<=", 1)
    incident: list[list[int]] = [[] for _ in V]
    for e, (i, j, _) in E:
        incident[i].append(e)
        incident[j].append(e)
    for i in V:
        for c in C:
            b.row("i", f"deg_{i}_{c}", [(y(i, c), 1)] + [(z(c, e), -1) for e in incident[i]], "<=", 0)
    # (j) arrival-time constraints on span edges
    if p.enable_time_constraints:
        for c in C:
            for e, (i, j, _) in E:
                gv = gam(c, e)
                b.row("j", f"time1_{c}_{e}", [(tt(j), 1), (tt(i), -1), (gv, -(n + 1))], ">=", -n)
                b.row("j", f"time2_{c}_{e}", [(tt(j), 1), (tt(i), -1), (gv, n)], "<=", n + 1)
    if p.min_size_active:
        b.row("35", "minsize", [(y(i, c), 1) for c in C for i in V], ">=", p.sigma * n)

    assoc_terms = [(v, float(w)) for c in C for e, (_, _, w) in E for v in (pii(c, e), pij(c, e))]
    if p.assoc_lower_bound is not None:
        b.row("assoc_lb", "assoc_lb", assoc_terms, ">=", p.assoc_lower_bound)

    if p.objective is Objective.MIN_CUT:
        sense = "min"
        obj = [(v, float(w)) for e, (_, _, w) in E for c1, c2 in opairs
               for v in (taui(e, c1, c2), tauj(e, c1, c2))]
    else:
        sense = "max"
        obj = assoc_terms
    return ModelIR(n, K, tuple(b.variables), tuple(b.constraints), sense, tuple(obj))


def nogood_cut(active: Iterable[tuple[int, int]], name: str | None = None) -> Constraint:
    """Row excluding the incumbent whose y-variables at one are exactly ``active``."""
    pairs = sorted(set(active))
    if not pairs:
        raise ModelError("no-good cut needs at least one active variable")
    if name is None:
        digest = hashlib.sha1(repr(pairs).encode()).hexdigest()[:12]
        name = f"nogood_{digest}"
    return Constraint(name, tuple((y(i, c), 1.0) for i, c in pairs), "<=", len(pairs) - 1, "nogood")


def _num(v: float) -> str:
    if float(v).is_integer():
        return str(int(v))
    return format(v, ".15g")


def _expr(terms: Sequence[tuple[str, float]]) -> list[str]:
    toks: list[str] = []
    for k, (var, coef) in enumerate(terms):
        sign = "-" if coef < 0 else "+"
        mag = _num(abs(coef))
        if k == 0:
            toks.append(f"{'-' if coef < 0 else ''}{mag} {var}")
        else:
            toks.append(f"{sign} {mag} {var}")
    return toks


def _wrap(head: str, toks: list[str], tail: str = "", width: int = 255) -> list[str]:
    lines, cur = [], head
    for tok in toks + ([tail] if tail else []):
        if len(cur) + 1 + len(tok) > width:
            lines.append(cur)
            cur = "  " + tok
        else:
            cur = f"{cur} {tok}" if cur else tok
    lines.append(cur)
    return lines


def emit_lp(m: ModelIR) -> str:
    """CPLEX-LP text for ``m``; byte-stable for equal models."""
    out = ["\\ soft graph clustering model", "Minimize" if m.sense == "min" else "Maximize"]
    obj = list(m.objective) or [(m.variables[0].name, 0.0)]
    out += _wrap(" obj:", _expr(obj))
    out.append("Subject To")
    for c in m.constraints:
        out += _wrap(f" {c.name}:", _expr(c.terms), f"{c.sense} {_num(c.rhs)}")
    out.append("Bounds")
    for v in m.variables:
        if v.kind != "binary":
            out.append(f" {_num(v.lo)} <= {v.name} <= {_num(v.hi)}")
    binaries = [v.name for v in m.variables if v.kind == "binary"]
    if binaries:
        out.append("Binaries")
        out += _wrap("", [" " + binaries[0]] + binaries[1:])
    out.append("End")
    return "\n".join(out) + "\n"
