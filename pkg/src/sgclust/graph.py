"""Undirected integer-weighted graphs: ingestion, random instances, reweighting."""

from __future__ import annotations

import io
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np


class GraphError(ValueError):
    """Raised for malformed graphs or edge-list input."""


@dataclass(frozen=True)
class Graph:
    """Undirected graph on vertices ``0..n-1`` with non-negative integer weights.

    ``edges`` is kept sorted by ``(i, j)`` with ``i < j``; the position of an
    edge in that list is its index in model variable names.
    """

    n: int
    edges: tuple[tuple[int, int, int], ...]
    _adj: tuple[frozenset[int], ...] = field(init=False, repr=False, compare=False)
    _weights: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 0:
            raise GraphError(f"vertex count must be non-negative, got {self.n}")
        norm = []
        seen = set()
        for i, j, w in self.edges:
            i, j, w = int(i), int(j), int(w)
            if i == j:
                raise GraphError(f"self-loop on vertex {i}")
            if i > j:
                i, j = j, i
            if i < 0 or j >= self.n:
                raise GraphError(f"edge ({i},{j}) outside vertex range 0..{self.n - 1}")
            if w < 0:
                raise GraphError(f"negative weight {w} on edge ({i},{j})")
            if (i, j) in seen:
                raise GraphError(f"duplicate edge ({i},{j})")
            seen.add((i, j))
            norm.append((i, j, w))
        norm.sort()
        object.__setattr__(self, "edges", tuple(norm))
        adj = [set() for _ in range(self.n)]
        for i, j, _ in norm:
            adj[i].add(j)
            adj[j].add(i)
        object.__setattr__(self, "_adj", tuple(frozenset(a) for a in adj))
        object.__setattr__(self, "_weights", {(i, j): w for i, j, w in norm})

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, i: int) -> frozenset[int]:
        return self._adj[i]

    def adjacent(self, i: int, j: int) -> bool:
        """The 0/1 adjacency entry ``a_ij``."""
        return j in self._adj[i]

    def weight(self, i: int, j: int) -> int:
        if i > j:
            i, j = j, i
        return self._weights.get((i, j), 0)

    def max_weight(self) -> int:
        return max((w for _, _, w in self.edges), default=0)

    def total_weight(self) -> int:
        return sum(w for _, _, w in self.edges)

    def with_weights(self, weights: Iterable[int]) -> "Graph":
        return Graph(self.n, tuple((i, j, w) for (i, j, _), w in zip(self.edges, weights)))

    def to_edge_list(self) -> str:
        buf = io.StringIO()
        buf.write(f"# n={self.n} m={self.m}\n")
        for i, j, w in self.edges:
            buf.write(f"{i} {j} {w}\n")
        return buf.getvalue()


def load_edge_list(text: str | bytes, n: int | None = None) -> Graph:
    """Parse ``i j [w]`` lines into a :class:`Graph`.

    Blank lines and lines starting with ``#`` are skipped. A missing weight
    means 1. The vertex count is one more than the largest id seen unless
    ``n`` is given explicitly.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    edges = []
    seen: dict[tuple[int, int], int] = {}
    top = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise GraphError(f"line {lineno}: expected 'i j [w]', got {raw!r}")
        try:
            vals = [int(p) for p in parts]
        except ValueError:
            raise GraphError(f"line {lineno}: non-integer field in {raw!r}") from None
        i, j = vals[0], vals[1]
        w = vals[2] if len(vals) == 3 else 1
        if i < 0 or j < 0:
            raise GraphError(f"line {lineno}: negative vertex id")
        if i == j:
            raise GraphError(f"line {lineno}: self-loop on vertex {i}")
        if w < 0:
            raise GraphError(f"line {lineno}: negative weight {w}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise GraphError(f"line {lineno}: duplicate edge {key} (first at line {seen[key]})")
        seen[key] = lineno
        edges.append((key[0], key[1], w))
        top = max(top, key[1])
    if n is None:
        n = top + 1
    elif n <= top:
        raise GraphError(f"vertex id {top} exceeds declared n={n}")
    return Graph(n, tuple(edges))


@dataclass(frozen=True)
class GeneratorConfig:
    n: int
    density: float
    max_weight: int
    seed: int

    def __post_init__(self) -> None:
        if self.n < 2:
            raise GraphError("generator needs at least 2 vertices")
        if not 0.0 < self.density <= 1.0:
            raise GraphError(f"density must lie in (0, 1], got {self.density}")
        if self.max_weight < 1:
            raise GraphError(f"max_weight must be >= 1, got {self.max_weight}")
        if not 0 <= self.seed < 2**64:
            raise GraphError("seed must be a 64-bit unsigned integer")
        if self.edge_count() < 1:
            raise GraphError("density too low: no edge requested")

    def pair_count(self) -> int:
        return self.n * (self.n - 1) // 2

    def edge_count(self) -> int:
        # round half up; the inner round absorbs float noise such as 0.7 * 45 = 31.4999...
        return math.floor(round(self.density * self.pair_count(), 9) + 0.5)

    @property
    def name(self) -> str:
        return class_name(self.n, self.density, self.max_weight)


def class_name(n: int, density: float, max_weight: int) -> str:
    """Instance-class label such as ``N15d015M50``."""
    digits = f"{density:.4f}".rstrip("0").replace(".", "")
    if digits == "1":
        digits = "10"
    return f"N{n}d{digits}M{max_weight}"


def parse_class_name(name: str) -> tuple[int, float, int]:
    """Inverse of :func:`class_name`: ``N15d025M50`` -> ``(15, 0.25, 50)``."""
    import re

    mt = re.fullmatch(r"N(\d+)d(\d+)M(\d+)", name.strip())
    if not mt:
        raise GraphError(f"bad class name {name!r}")
    d = mt.group(2)
    density = 1.0 if d == "10" else float(d[0] + "." + d[1:])
    return int(mt.group(1)), density, int(mt.group(3))


class _BoundedDraws:
    """Unbiased bounded integers from raw PCG64 output (rejection sampling)."""

    def __init__(self, seed: int) -> None:
        self._bitgen = np.random.PCG64(seed)

    def below(self, bound: int) -> int:
        limit = (2**64 // bound) * bound
        while True:
            u = int(self._bitgen.random_raw())
            if u < limit:
                return u % bound


def generate_random(cfg: GeneratorConfig) -> Graph:
    """Random instance with exactly ``cfg.edge_count()`` edges.

    Algorithm (fixed, so instances are reproducible): a PCG64 stream seeded
    with ``cfg.seed`` yields raw 64-bit words, turned into a uniform integer
    in ``[0, b)`` by rejecting words ``>= floor(2**64 / b) * b`` and taking
    the remainder. Floyd's sampling picks ``m`` distinct indices into the
    lexicographic list of pairs ``(i, j), i < j``; the selected pairs are
    sorted, then each gets a weight ``1 + below(max_weight)`` in that order.
    """
    total = cfg.pair_count()
    m = cfg.edge_count()
    if m > total:
        raise GraphError(f"density {cfg.density} asks for {m} edges, only {total} pairs exist")
    draws = _BoundedDraws(cfg.seed)
    chosen: set[int] = set()
    for j in range(total - m, total):
        t = draws.below(j + 1)
        chosen.add(j if t in chosen else t)
    pairs = list(itertools.combinations(range(cfg.n), 2))
    edges = []
    for idx in sorted(chosen):
        i, j = pairs[idx]
        edges.append((i, j, 1 + draws.below(cfg.max_weight)))
    return Graph(cfg.n, tuple(edges))


def transform_unit_weights(g: Graph) -> Graph:
    """Reweight every edge as 1 + the number of common neighbours of its endpoints."""
    return g.with_weights(1 + len(g.neighbors(i) & g.neighbors(j)) for i, j, _ in g.edges)


def connected_components(g: Graph, vertices: Iterable[int] | None = None) -> list[set[int]]:
    """Components of ``g`` (or of the subgraph induced by ``vertices``), ordered by smallest member."""
    pool = set(range(g.n)) if vertices is None else set(vertices)
    comps = []
    for start in sorted(pool):
        if not pool or start not in pool:
            continue
        comp = {start}
        stack = [start]
        pool.discard(start)
        while stack:
            v = stack.pop()
            for u in g.neighbors(v):
                if u in pool:
                    pool.discard(u)
                    comp.add(u)
                    stack.append(u)
        comps.append(comp)
    return comps
