"""Exhaustive reference solver for tiny instances.

Every binary pattern y is enumerated (compiled kernel). Given y, all other
indicators of the model are determined (t, eta, s, z as products of y;
span variables at their maximum), so the rest is a small LP over the
membership proportions x, solved with scipy's HiGHS LP interface.
Patterns are visited best-bound first so most LPs are skipped.
"""

from __future__ import annotations

import math
import time
from typing import Iterable

import numpy as np
from scipy.optimize import linprog

from .. import kernels
from ..graph import Graph
from ..model import ClusterParams, Objective
from .solution import Solution, Status

MAX_PATTERN_BITS = 24


class OracleError(ValueError):
    pass


def feasible_patterns(g: Graph, p: ClusterParams) -> list[list[frozenset[int]]]:
    """Cluster vertex sets of every y pattern passing the y-only constraints."""
    n, K = g.n, p.K
    masks = _masks(g, p)
    low = (1 << n) - 1
    return [[_bits((int(mk) >> (c * n)) & low) for c in range(K)] for mk in masks]


def _masks(g: Graph, p: ClusterParams) -> np.ndarray:
    adj = [sum(1 << j for j in g.neighbors(i)) for i in range(g.n)]
    min_total = math.ceil(p.sigma * g.n - 1e-9) if p.min_size_active else 0
    return kernels.feasible_masks(g.n, p.K, adj, p.nu, min_total)


def _bits(s: int) -> frozenset[int]:
    return frozenset(i for i in range(s.bit_length()) if (s >> i) & 1)


def _coefficients(g: Graph, p: ClusterParams, sets: list[frozenset[int]], which: Objective):
    """Linear objective coefficient of each x_{i,c} once y is fixed."""
    coef: dict[tuple[int, int], float] = {}
    K = p.K
    if which is Objective.MAX_ASSOCIATION:
        for i, j, w in g.edges:
            for c in range(K):
                if i in sets[c] and j in sets[c]:
                    coef[(i, c)] = coef.get((i, c), 0.0) + w
                    coef[(j, c)] = coef.get((j, c), 0.0) + w
        return coef
    for i, j, w in g.edges:
        for c1 in range(K):
            if i not in sets[c1]:
                continue
            for c2 in range(K):
                if c2 == c1 or j not in sets[c2]:
                    continue
                both = sets[c1] & sets[c2]
                if i in both and j in both:
                    continue
                coef[(i, c1)] = coef.get((i, c1), 0.0) + w
                coef[(j, c2)] = coef.get((j, c2), 0.0) + w
    return coef


def brute_force_oracle(g: Graph, p: ClusterParams,
                       excluded: Iterable[Iterable[tuple[int, int]]] = ()) -> Solution:
    """Optimal solution of the clustering MILP by exhaustive enumeration.

    ``excluded`` lists y-supports cut off by no-good rows. Time constraints
    are not supported.
    """
    if g.n * p.K > MAX_PATTERN_BITS:
        raise OracleError(f"n*K = {g.n * p.K} exceeds enumeration bound {MAX_PATTERN_BITS}")
    if p.enable_time_constraints:
        raise OracleError("oracle does not model time constraints")
    p.check_graph(g)
    start = time.perf_counter()
    cuts = [frozenset(ex) for ex in excluded]
    maximize = p.objective is Objective.MAX_ASSOCIATION
    sgn = -1.0 if maximize else 1.0

    candidates = []
    for sets in feasible_patterns(g, p):
        if cuts:
            support = frozenset((i, c) for c, sc in enumerate(sets) for i in sc)
            if any(cut <= support for cut in cuts):
                continue
        coef = _coefficients(g, p, sets, p.objective)
        mult = {}
        for sc in sets:
            for i in sc:
                mult[i] = mult.get(i, 0) + 1
        # bound on the objective from the box each x_{i,c} lives in
        bound = 0.0
        for (i, c), a in coef.items():
            lo = 1.0 if mult[i] == 1 else p.mu
            hi = 1.0 - p.mu * (mult[i] - 1)
            bound += a * (hi if maximize else lo)
        candidates.append((sgn * bound, sets, coef))
    candidates.sort(key=lambda item: item[0])

    best_val, best = math.inf, None
    for key, sets, coef in candidates:
        if key >= best_val - 1e-9:
            break
        res = _solve_x(g, p, sets, coef, sgn)
        if res is None:
            continue
        val, xs = res
        if sgn * val < best_val - 1e-9:
            best_val, best = sgn * val, (sets, xs, val)

    elapsed = time.perf_counter() - start
    if best is None:
        return Solution(Status.INFEASIBLE, solve_seconds=elapsed, backend="oracle")
    sets, xs, val = best
    ys = {(i, c): int(i in sets[c]) for i in range(g.n) for c in range(p.K)}
    return Solution(Status.OPTIMAL, float(val), 0.0, ys, xs, elapsed, backend="oracle")


def _solve_x(g, p, sets, coef, sgn):
    K = p.K
    cols = [(i, c) for c in range(K) for i in sorted(sets[c])]
    if not cols:
        if p.assoc_lower_bound is not None and p.assoc_lower_bound > 1e-9:
            return None
        return 0.0, {(i, c): 0.0 for i in range(g.n) for c in range(K)}
    col = {key: k for k, key in enumerate(cols)}
    nv = len(cols)
    c_vec = np.array([sgn * coef.get(key, 0.0) for key in cols])

    a_eq, b_eq = [], []
    for i in range(g.n):
        row = np.zeros(nv)
        for c in range(K):
            if (i, c) in col:
                row[col[(i, c)]] = 1.0
        if row.any():
            a_eq.append(row)
            b_eq.append(1.0)
    a_ub, b_ub = [], []
    members = [np.array([1.0 if key[1] == c else 0.0 for key in cols]) for c in range(K)]
    for c1 in range(K):
        for c2 in range(K):
            if c1 != c2:
                a_ub.append((1 - p.delta) * members[c1] - members[c2])
                b_ub.append(0.0)
                a_ub.append(members[c2] - (1 + p.delta) * members[c1])
                b_ub.append(0.0)
    if p.assoc_lower_bound is not None:
        assoc = _coefficients(g, p, sets, Objective.MAX_ASSOCIATION)
        a_ub.append(-np.array([assoc.get(key, 0.0) for key in cols]))
        b_ub.append(-p.assoc_lower_bound)
    res = linprog(c_vec, A_ub=np.array(a_ub) if a_ub else None, b_ub=b_ub or None,
                  A_eq=np.array(a_eq), b_eq=b_eq, bounds=[(p.mu, 1.0)] * nv, method="highs")
    if res.status != 0:
        return None
    xs = {(i, c): 0.0 for i in range(g.n) for c in range(K)}
    for key, v in zip(cols, res.x):
        xs[key] = float(min(1.0, max(0.0, v)))
    return sgn * float(res.fun), xs
