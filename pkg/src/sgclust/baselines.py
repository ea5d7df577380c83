"""Comparison methods: MaxMax and k-clique percolation (CFinder style)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import networkx as nx

from .graph import Graph


@dataclass(frozen=True)
class SoftClustering:
    clusters: tuple[frozenset[int], ...]
    origin: str  # "maxmax" | "clique_percolation" | "milp"

    def to_json(self) -> dict:
        return {
            "origin": self.origin,
            "clusters": [sorted(c) for c in self.clusters],
            "y": [[i, c, 1] for c, members in enumerate(self.clusters) for i in sorted(members)],
        }


def maxmax_arcs(g: Graph) -> dict[int, set[int]]:
    """Arc u -> v whenever w(u, v) is the largest weight incident to v (ties all kept)."""
    best = [0] * g.n
    for i, j, w in g.edges:
        best[i] = max(best[i], w)
        best[j] = max(best[j], w)
    succ: dict[int, set[int]] = {v: set() for v in range(g.n)}
    for i, j, w in g.edges:
        if w == best[j]:
            succ[i].add(j)
        if w == best[i]:
            succ[j].add(i)
    return succ


def _descendants(succ: dict[int, set[int]], root: int) -> set[int]:
    seen, stack = set(), [root]
    while stack:
        for u in succ[stack.pop()]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    seen.discard(root)
    return seen


def maxmax(g: Graph) -> SoftClustering:
    succ = maxmax_arcs(g)
    root = [True] * g.n
    for v in range(g.n):
        if root[v]:
            for u in _descendants(succ, v):
                root[u] = False
    clusters = tuple(frozenset({v} | _descendants(succ, v)) for v in range(g.n) if root[v])
    return SoftClustering(clusters, "maxmax")


def k_cliques(h: nx.Graph, k: int) -> set[frozenset[int]]:
    """All k-vertex cliques, as k-subsets of the maximal cliques."""
    out = set()
    for clique in nx.find_cliques(h):
        if len(clique) >= k:
            out.update(frozenset(c) for c in itertools.combinations(sorted(clique), k))
    return out


def clique_percolation(g: Graph, k: int = 3, w_star: float = 0) -> SoftClustering:
    """Communities of adjacent k-cliques in the graph of edges heavier than ``w_star``."""
    if k < 2:
        raise ValueError("clique size k must be >= 2")
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from((i, j) for i, j, w in g.edges if w > w_star)
    cliques = sorted(k_cliques(h, k), key=sorted)
    parent = list(range(len(cliques)))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    by_face: dict[frozenset[int], int] = {}
    for idx, cl in enumerate(cliques):
        for face in itertools.combinations(sorted(cl), k - 1):
            f = frozenset(face)
            if f in by_face:
                parent[find(idx)] = find(by_face[f])
            else:
                by_face[f] = idx
    groups: dict[int, set[int]] = {}
    for idx, cl in enumerate(cliques):
        groups.setdefault(find(idx), set()).update(cl)
    comms = sorted((frozenset(s) for s in groups.values()), key=lambda s: (min(s), sorted(s)))
    return SoftClustering(tuple(comms), "clique_percolation")
