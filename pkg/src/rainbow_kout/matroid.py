"""Rank oracles for the two matroids living on the edge set of a coloured
k-out multigraph: the graphic matroid (independent = forest; a parallel pair
is a 2-cycle) and the colour partition matroid (independent = rainbow).
"""
from __future__ import annotations

from typing import Iterable

from .model import Colouring, MultiGraph

__all__ = [
    "DisjointSetForest",
    "kappa",
    "graphic_rank",
    "graphic_independent",
    "partition_rank",
]


class DisjointSetForest:
    """Union-find with path halving and union by rank; tracks the number of
    disjoint sets so component counts come out for free."""

    __slots__ = ("parent", "rank", "components")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n
        self.components = n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, x: int, y: int) -> bool:
        """Merge the sets of x and y; returns False if already joined."""
        i, j = self.find(x), self.find(y)
        if i == j:
            return False
        if self.rank[i] < self.rank[j]:
            i, j = j, i
        self.parent[j] = i
        if self.rank[i] == self.rank[j]:
            self.rank[i] += 1
        self.components -= 1
        return True


def _forest_of(g: MultiGraph, edges: Iterable[int]) -> DisjointSetForest:
    dsf = DisjointSetForest(g.n)
    k = g.k
    targets = g.targets
    for e in edges:
        v, j = divmod(e, k)
        dsf.union(v, int(targets[v, j]))  # loops are a no-op
    return dsf


def kappa(g: MultiGraph, edges: Iterable[int]) -> int:
    """Number of connected components of the spanning subgraph ([n], edges);
    isolated vertices count."""
    return _forest_of(g, edges).components


def graphic_rank(g: MultiGraph, edges: Iterable[int]) -> int:
    """Rank in the graphic matroid: n - kappa(edges)."""
    return g.n - kappa(g, edges)


def graphic_independent(g: MultiGraph, edges: Iterable[int], e: int) -> bool:
    """Given a forest, may edge e join it? True iff e's endpoints lie in
    different components (loops never qualify)."""
    dsf = _forest_of(g, edges)
    u, v = g.endpoints(e)
    return u != v and dsf.find(u) != dsf.find(v)


def partition_rank(c: Colouring, edges: Iterable[int]) -> int:
    """Rank in the colour partition matroid: distinct colours in the set."""
    colour_of = c.colour_of
    return len({int(colour_of[e]) for e in edges})
