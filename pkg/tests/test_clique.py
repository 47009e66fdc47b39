import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coreclust import CoocGraph, brute_force_max_clique, build_threshold_graph, largest_maximal_clique
from coreclust.clique import CliqueTooLarge


def random_graph(g, n, density, ids=None):
    upper = np.triu(g.random((n, n)) < density, 1)
    ids = tuple(range(n)) if ids is None else tuple(ids)
    return CoocGraph(ids, upper | upper.T)


def is_clique(g, S):
    pos = {v: i for i, v in enumerate(g.vertices)}
    return all(g.adjacency[pos[u], pos[v]] for u, v in itertools.combinations(S, 2))


def test_complete_graph():
    g = CoocGraph(tuple(range(5)), np.ones((5, 5), bool))
    assert largest_maximal_clique(g) == frozenset(range(5))


def test_edgeless_tie_rule():
    g = CoocGraph((9, 3, 7), np.zeros((3, 3), bool))
    assert largest_maximal_clique(g) == {3}
    assert brute_force_max_clique(g) == {3}


def test_triangle_plus_pendant():
    g = CoocGraph.from_edges([0, 1, 2, 3], [(0, 1), (1, 2), (0, 2), (2, 3)])
    assert brute_force_max_clique(g) == {0, 1, 2}
    assert largest_maximal_clique(g) == {0, 1, 2}


def test_single_vertex():
    g = CoocGraph((4,), np.zeros((1, 1), bool))
    assert brute_force_max_clique(g) == {4} == largest_maximal_clique(g)


def test_path_of_four():
    g = CoocGraph.from_edges([10, 11, 12, 13], [(10, 11), (11, 12), (12, 13)])
    # the non-empty subsets that are cliques: 4 singletons and 3 edges; first edge wins
    cliques = [S for r in range(1, 5) for S in itertools.combinations(g.vertices, r) if is_clique(g, S)]
    assert len(cliques) == 7
    assert brute_force_max_clique(g) == {10, 11} == largest_maximal_clique(g)


def test_threshold_graph_inclusive():
    P = np.eye(3)
    for (i, j), v in {(0, 1): 0.95, (0, 2): 0.85, (1, 2): 0.90}.items():
        P[i, j] = P[j, i] = v
    g = build_threshold_graph(P, [0, 1, 2], 0.1)
    assert g.edges() == [(0, 1), (1, 2)]


def test_threshold_graph_extremes():
    P = np.random.default_rng(0).uniform(0, 0.5, (6, 6))
    P = (P + P.T) / 2
    np.fill_diagonal(P, 1)
    assert len(build_threshold_graph(P, range(6), 1.0).edges()) == 15
    assert build_threshold_graph(P, range(6), 0.1).edges() == []
    with pytest.raises(IndexError):
        build_threshold_graph(P, [0, 6], 0.1)
    with pytest.raises(ValueError):
        build_threshold_graph(P, [], 0.1)


def test_graph_invariants():
    with pytest.raises(ValueError):
        CoocGraph((0, 0), np.zeros((2, 2), bool))
    with pytest.raises(ValueError):
        CoocGraph((0, 1), np.array([[0, 1], [0, 0]], bool))
    g = CoocGraph((0, 1), np.ones((2, 2), bool))
    assert not g.adjacency.diagonal().any()


def test_random_graphs_match_brute_force():
    g = np.random.default_rng(123)
    for _ in range(200):
        G = random_graph(g, 10, 0.5)
        assert largest_maximal_clique(G) == brute_force_max_clique(G)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 15), st.sampled_from([0.2, 0.5, 0.8, 0.95]), st.integers(0, 2**32 - 1))
def test_oracle_equivalence_with_shuffled_ids(n, density, seed):
    g = np.random.default_rng(seed)
    ids = g.permutation(200)[:n]
    G = random_graph(g, n, density, ids)
    got = largest_maximal_clique(G)
    assert got == brute_force_max_clique(G)
    assert is_clique(G, got)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 14), st.integers(0, 2**32 - 1), st.floats(0, 1), st.floats(0, 1))
def test_clique_size_monotone_in_alpha(n, seed, a1, a2):
    lo, hi = sorted((a1, a2))
    P = np.random.default_rng(seed).random((n, n))
    P = (P + P.T) / 2
    members = list(range(n))
    small = largest_maximal_clique(build_threshold_graph(P, members, lo))
    large = largest_maximal_clique(build_threshold_graph(P, members, hi))
    assert len(large) >= len(small)
    assert largest_maximal_clique(build_threshold_graph(P, members, 1.0)) == frozenset(members)


def test_vertex_ceiling():
    G = CoocGraph(tuple(range(30)), np.zeros((30, 30), bool))
    with pytest.raises(CliqueTooLarge):
        largest_maximal_clique(G, max_vertices=29)
    with pytest.raises(CliqueTooLarge):
        brute_force_max_clique(G)


def clique_number(G):
    _, size = nx.max_weight_clique(nx.from_numpy_array(G.adjacency.astype(int)), weight=None)
    return size


def test_dense_random_graph():
    G = random_graph(np.random.default_rng(7), 100, 0.95)
    S = largest_maximal_clique(G)
    assert is_clique(G, S) and len(S) == clique_number(G)


@settings(max_examples=40, deadline=None)
@given(st.integers(16, 45), st.sampled_from([0.3, 0.6, 0.85]), st.integers(0, 2**32 - 1))
def test_size_matches_networkx_beyond_brute_force(n, density, seed):
    G = random_graph(np.random.default_rng(seed), n, density)
    S = largest_maximal_clique(G)
    assert is_clique(G, S) and len(S) == clique_number(G)


@pytest.mark.parametrize("n,k,density", [(400, 250, 0.5), (1000, 700, 0.8)])
def test_planted_clique(n, k, density):
    # the shape of a within-cluster threshold graph: a large stable block plus noisy edges
    g = np.random.default_rng(1)
    upper = np.triu(g.random((n, n)) < density, 1)
    A = upper | upper.T
    S = g.permutation(n)[:k]
    A[np.ix_(S, S)] = True
    np.fill_diagonal(A, False)
    G = CoocGraph(tuple(range(n)), A)
    C = largest_maximal_clique(G)
    assert len(C) == k and set(S.tolist()) <= C


def test_save_edges(tmp_path):
    G = CoocGraph.from_edges([5, 2, 9], [(5, 9), (2, 5)])
    G.save_edges(tmp_path / "g.csv")
    assert (tmp_path / "g.csv").read_text() == "i,j\n2,5\n5,9\n"
