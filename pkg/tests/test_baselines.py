import itertools
import random

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from sgclust.baselines import clique_percolation, k_cliques, maxmax, maxmax_arcs
from sgclust.graph import Graph, connected_components

from conftest import complete, two_triangles


def random_connected_unit(n, extra, seed):
    rnd = random.Random(seed)
    order = list(range(n))
    rnd.shuffle(order)
    edges = {tuple(sorted((order[k], order[rnd.randrange(k)]))) for k in range(1, n)}
    pairs = [p for p in itertools.combinations(range(n), 2) if p not in edges]
    edges |= set(rnd.sample(pairs, min(extra, len(pairs))))
    return Graph(n, tuple((i, j, 1) for i, j in edges))


def test_maxmax_path_example():
    g = Graph(3, ((0, 1, 5), (1, 2, 1)))
    arcs = maxmax_arcs(g)
    assert arcs == {0: {1}, 1: {0, 2}, 2: set()}
    res = maxmax(g)
    assert [sorted(c) for c in res.clusters] == [[0, 1, 2]]


def reference_maxmax(g):
    """Independent re-implementation: adjacency matrix, networkx reachability."""
    W = [[g.weight(i, j) if g.adjacent(i, j) else None for j in range(g.n)] for i in range(g.n)]
    d = nx.DiGraph()
    d.add_nodes_from(range(g.n))
    for v in range(g.n):
        ws = [w for w in W[v] if w is not None]
        for u in range(g.n):
            if W[u][v] is not None and W[u][v] == max(ws):
                d.add_edge(u, v)
    root = dict.fromkeys(range(g.n), True)
    for v in range(g.n):
        if root[v]:
            for u in nx.descendants(d, v):
                root[u] = False
    return sorted(sorted({v} | nx.descendants(d, v)) for v in range(g.n) if root[v])


def test_maxmax_path_with_heavy_middle():
    # 1 and 2 point at each other; 0 and 3 are pulled in through their only edges
    g = Graph(4, ((0, 1, 1), (1, 2, 5), (2, 3, 1)))
    assert maxmax_arcs(g) == {0: set(), 1: {0, 2}, 2: {1, 3}, 3: set()}
    assert [sorted(c) for c in maxmax(g).clusters] == [[0, 1, 2, 3]]


def test_maxmax_two_heavy_pairs():
    # the light bridge (1, 2) is nobody's heaviest edge
    g = Graph(4, ((0, 1, 5), (1, 2, 1), (2, 3, 5)))
    assert sorted(map(sorted, maxmax(g).clusters)) == [[0, 1], [2, 3]]


@pytest.mark.parametrize("seed", range(5))
def test_maxmax_one_cluster_on_connected_unit_graphs(seed):
    g = random_connected_unit(9, 6, seed)
    assert len(connected_components(g)) == 1
    res = maxmax(g)
    assert len(res.clusters) == 1 and res.clusters[0] == frozenset(range(9))


def test_maxmax_two_components():
    res = maxmax(two_triangles())
    assert sorted(map(sorted, res.clusters)) == [[0, 1, 2], [3, 4, 5]]


def test_maxmax_isolated_vertex_is_own_cluster():
    g = Graph(3, ((0, 1, 1),))
    assert sorted(map(sorted, maxmax(g).clusters)) == [[0, 1], [2]]


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 10), st.integers(0, 8), st.integers(0, 10**6))
def test_maxmax_covers_every_vertex(n, extra, seed):
    g = random_connected_unit(n, extra, seed)
    g = g.with_weights(random.Random(seed).randint(1, 4) for _ in g.edges)
    res = maxmax(g)
    assert set().union(*res.clusters) == set(range(n))
    assert sorted(map(sorted, res.clusters)) == reference_maxmax(g)


def test_k_cliques_of_k4():
    h = nx.complete_graph(4)
    assert len(k_cliques(h, 3)) == 4
    assert k_cliques(h, 5) == set()


def test_cpm_two_triangles_sharing_an_edge():
    g = Graph(4, ((0, 1, 1), (0, 2, 1), (1, 2, 1), (1, 3, 1), (2, 3, 1)))
    res = clique_percolation(g, k=3)
    assert [sorted(c) for c in res.clusters] == [[0, 1, 2, 3]]


def test_cpm_triangles_sharing_a_vertex_stay_apart():
    g = Graph(5, ((0, 1, 1), (0, 2, 1), (1, 2, 1), (2, 3, 1), (2, 4, 1), (3, 4, 1)))
    res = clique_percolation(g, k=3)
    assert [sorted(c) for c in res.clusters] == [[0, 1, 2], [2, 3, 4]]


def test_cpm_weight_threshold():
    g = Graph(4, ((0, 1, 5), (0, 2, 5), (1, 2, 5), (1, 3, 1), (2, 3, 1)))
    assert [sorted(c) for c in clique_percolation(g, 3, w_star=1).clusters] == [[0, 1, 2]]
    assert clique_percolation(g, 3, w_star=5).clusters == ()


def test_cpm_bad_k():
    with pytest.raises(ValueError):
        clique_percolation(complete(3), k=1)


@settings(max_examples=30, deadline=None)
@given(st.integers(4, 11), st.floats(0.2, 0.9), st.integers(0, 10**6), st.sampled_from([3, 4]))
def test_cpm_matches_networkx(n, p, seed, k):
    h = nx.gnp_random_graph(n, p, seed=seed)
    g = Graph(n, tuple((i, j, 1) for i, j in h.edges))
    ours = set(clique_percolation(g, k).clusters)
    ref = {frozenset(c) for c in nx.algorithms.community.k_clique_communities(h, k)}
    assert ours == ref


def test_soft_clustering_json():
    data = clique_percolation(complete(3), 3).to_json()
    assert data["origin"] == "clique_percolation"
    assert data["clusters"] == [[0, 1, 2]]
    assert data["y"] == [[0, 0, 1], [1, 0, 1], [2, 0, 1]]
