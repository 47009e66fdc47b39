"""Threshold graphs over one cluster and their maximum cliques.

Vertices are item ids. Among several maximum cliques the one whose sorted id
list is lexicographically smallest is returned, so results are reproducible.
Adjacency is held as Python-int bitsets indexed by the position of each
vertex in ascending id order.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Sequence

import numpy as np

DEFAULT_MAX_VERTICES = 5000
BRUTE_FORCE_LIMIT = 22


class CliqueTooLarge(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class CoocGraph:
    vertices: tuple[int, ...]
    adjacency: np.ndarray

    def __post_init__(self):
        verts = tuple(int(v) for v in self.vertices)
        if len(set(verts)) != len(verts):
            raise ValueError("duplicate vertices")
        adj = np.array(self.adjacency, dtype=bool, copy=True)
        if adj.shape != (len(verts), len(verts)):
            raise ValueError("adjacency shape does not match vertex count")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        np.fill_diagonal(adj, False)
        adj.setflags(write=False)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "adjacency", adj)

    def __len__(self):
        return len(self.vertices)

    @classmethod
    def from_edges(cls, vertices: Sequence[int], edges) -> "CoocGraph":
        pos = {int(v): i for i, v in enumerate(vertices)}
        adj = np.zeros((len(pos), len(pos)), bool)
        for u, v in edges:
            adj[pos[u], pos[v]] = adj[pos[v], pos[u]] = True
        return cls(tuple(vertices), adj)

    def edges(self) -> list[tuple[int, int]]:
        i, j = np.nonzero(np.triu(self.adjacency, k=1))
        return sorted((min(self.vertices[a], self.vertices[b]), max(self.vertices[a], self.vertices[b]))
                      for a, b in zip(i, j))

    def save_edges(self, path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            fh.write("i,j\n")
            for u, v in self.edges():
                fh.write(f"{u},{v}\n")

    def _bitsets(self):
        """Vertex ids in ascending order and neighbour bitsets in that order."""
        order = np.argsort(np.array(self.vertices, dtype=np.int64), kind="stable")
        ids = [self.vertices[o] for o in order]
        sub = self.adjacency[np.ix_(order, order)]
        nbrs = []
        for row in sub:
            bits = 0
            for j in np.flatnonzero(row):
                bits |= 1 << int(j)
            nbrs.append(bits)
        return ids, nbrs


def build_threshold_graph(p, members: Sequence[int], alpha: float) -> CoocGraph:
    """Graph on ``members`` with an edge wherever co-occurrence is at least ``1 - alpha``."""
    P = getattr(p, "p", p)
    members = [int(v) for v in members]
    if not members:
        raise ValueError("members must be non-empty")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    n = P.shape[0]
    if any(v < 0 or v >= n for v in members):
        raise IndexError(f"member id out of range for {n} items")
    sub = P[np.ix_(members, members)]
    return CoocGraph(tuple(members), sub >= 1.0 - alpha)


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def largest_maximal_clique(g: CoocGraph, max_vertices: int = DEFAULT_MAX_VERTICES) -> frozenset[int]:
    """Maximum clique of ``g``; the lexicographically smallest one on ties.

    Exact branch and bound: candidates are greedily coloured and a branch is
    cut when the clique so far plus its number of colours cannot beat the
    incumbent. Vertices adjacent to every other vertex belong to all maximum
    cliques and are set aside first. A second pass builds the smallest
    maximum clique one member at a time, keeping the smallest vertex that
    still admits a clique of the full size. The answer is checked for
    pairwise adjacency and maximality before it is returned.
    """
    nv = len(g)
    if nv == 0:
        raise ValueError("empty graph")
    if nv > max_vertices:
        raise CliqueTooLarge(f"{nv} vertices exceed the limit of {max_vertices}")
    ids, nbrs = g._bitsets()

    # search on bit positions ordered by decreasing degree: tighter colourings
    rank = sorted(range(nv), key=lambda v: -_popcount(nbrs[v]))
    pos = [0] * nv
    for q, v in enumerate(rank):
        pos[v] = q
    adj = [_remap(nbrs[v], pos) for v in rank]
    # higher[q]: positions of vertices with a larger id than the vertex at q
    higher = [0] * nv
    acc = 0
    for v in range(nv - 1, -1, -1):
        higher[pos[v]] = acc
        acc |= 1 << pos[v]

    full = (1 << nv) - 1
    universal = [q for q in range(nv) if adj[q] | (1 << q) == full]
    live = full
    for q in universal:
        live &= ~(1 << q)
    best = universal
    if live:
        found = _max_clique(live, adj, 0)
        best = universal + _lex_smallest(live, adj, found, [pos[v] for v in range(nv)], higher)
    best = sorted(rank[q] for q in best)

    _check_clique(best, nbrs, nv)
    return frozenset(ids[i] for i in best)


def _remap(bits: int, pos) -> int:
    out = 0
    for v in _bits(bits):
        out |= 1 << pos[v]
    return out


def _colour_classes(P: int, nbrs) -> tuple[list[int], list[int]]:
    """Greedy colouring of ``P``; vertices listed by colour with the running colour count."""
    order, bound = [], []
    colour = 0
    uncoloured = P
    while uncoloured:
        colour += 1
        Q = uncoloured
        while Q:
            low = Q & -Q
            v = low.bit_length() - 1
            Q &= ~low & ~nbrs[v]
            uncoloured &= ~low
            order.append(v)
            bound.append(colour)
    return order, bound


def _max_clique(P: int, nbrs, floor: int, stop_at: int | None = None) -> list[int] | None:
    """Largest clique inside ``P`` with more than ``floor`` members, else None.

    With ``stop_at`` the search returns as soon as a clique of that size is seen.
    """
    best, size = None, floor
    R: list[int] = []
    order, bound = _colour_classes(P, nbrs)
    stack = [[P, order, bound, len(order) - 1]]
    while stack:
        top = stack[-1]
        P, order, bound, i = top
        # colours never increase towards the front of the list
        if i < 0 or len(R) + bound[i] <= size:
            stack.pop()
            if R:
                R.pop()
            continue
        v = order[i]
        top[3] = i - 1
        top[0] = P & ~(1 << v)
        if len(R) + 1 > size:
            best, size = R + [v], len(R) + 1
            if stop_at is not None and size >= stop_at:
                return best
        sub = P & nbrs[v]
        if sub:
            R.append(v)
            o, b = _colour_classes(sub, nbrs)
            stack.append([sub, o, b, len(o) - 1])
    return best


def _lex_smallest(P: int, nbrs, witness: list[int], by_id, higher) -> list[int]:
    """Clique of ``len(witness)`` inside ``P`` whose sorted id list is smallest.

    ``witness`` is any clique of the wanted size. ``by_id`` lists bit
    positions in ascending id order; ``higher[q]`` masks the positions holding
    larger ids than position ``q``.
    """
    id_rank = {q: r for r, q in enumerate(by_id)}
    chosen: list[int] = []
    need = len(witness)
    # the witness always extends ``chosen`` to a clique of the full size
    rest = sorted(witness, key=id_rank.__getitem__)
    while need:
        for q in by_id:
            if not P >> q & 1:
                continue
            above = P & nbrs[q] & higher[q]
            if q == rest[0]:
                rest = rest[1:]
            elif need == 1:
                rest = []
            else:
                if _popcount(above) < need - 1:
                    continue
                found = _max_clique(above, nbrs, need - 2, need - 1)
                if found is None:
                    continue
                rest = sorted(found, key=id_rank.__getitem__)
            chosen.append(q)
            P = above
            need -= 1
            break
        else:
            raise AssertionError("no clique of the size found in the first pass")
    return chosen


def _check_clique(members, nbrs, nv):
    mask = 0
    for v in members:
        mask |= 1 << v
    for v in members:
        if (nbrs[v] | (1 << v)) & mask != mask:
            raise AssertionError("clique search returned a non-clique")
    for u in range(nv):
        if not mask >> u & 1 and nbrs[u] & mask == mask:
            raise AssertionError("clique search returned a non-maximal clique")


def brute_force_max_clique(g: CoocGraph) -> frozenset[int]:
    """Exhaustive search over vertex subsets; same tie rule as :func:`largest_maximal_clique`.

    Sizes are tried in increasing order and subsets of each size in
    lexicographic order; the search stops at the first size with no clique.
    """
    nv = len(g)
    if nv == 0:
        raise ValueError("empty graph")
    if nv > BRUTE_FORCE_LIMIT:
        raise CliqueTooLarge(f"brute force limited to {BRUTE_FORCE_LIMIT} vertices, got {nv}")
    ids = sorted(g.vertices)
    pos = {v: i for i, v in enumerate(g.vertices)}
    A = g.adjacency
    ok = lambda S: all(A[pos[u], pos[v]] for u, v in combinations(S, 2))
    best = (ids[0],)
    for size in range(2, nv + 1):
        found = next((S for S in combinations(ids, size) if ok(S)), None)
        if found is None:
            break
        best = found
    return frozenset(best)
