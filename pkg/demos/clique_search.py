"""
From co-occurrence probabilities to a core
==========================================

A core is the largest group of cluster members that all pairwise
co-occur at or above 1 - alpha: the maximum clique of a threshold graph.
"""
import numpy as np

from coreclust import brute_force_max_clique, build_threshold_graph, largest_maximal_clique

P = np.array([
    [1.00, 0.97, 0.95, 0.91, 0.60],
    [0.97, 1.00, 0.93, 0.88, 0.55],
    [0.95, 0.93, 1.00, 0.92, 0.70],
    [0.91, 0.88, 0.92, 1.00, 0.90],
    [0.60, 0.55, 0.70, 0.90, 1.00],
])
members = [0, 1, 2, 3, 4]

for alpha in (0.05, 0.1, 0.15, 0.5):
    g = build_threshold_graph(P, members, alpha)
    core = sorted(largest_maximal_clique(g))
    print(f"alpha={alpha:<5} edges={len(g.edges()):>2}  core={core}")

# the exhaustive oracle agrees, including which of several equal cliques is returned
g = build_threshold_graph(P, members, 0.1)
print("brute force at alpha=0.1:", sorted(brute_force_max_clique(g)))
