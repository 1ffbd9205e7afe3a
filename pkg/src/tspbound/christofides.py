"""Christofides tour construction.

MST -> odd-degree vertices -> exact perfect matching -> Eulerian circuit
-> triangle-inequality shortcutting.  Every tie-break (MST edge order,
matching pairs, Euler neighbor choice) is lexicographic, so the whole
construction is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matching import Matching, greedy_matching, min_weight_perfect_matching
from .tours import DistanceMatrix, Tour, tour_length, triangle_inequality_holds

__all__ = [
    "SpanningTree",
    "EvenMultiGraph",
    "ConstructionTrace",
    "minimum_spanning_tree",
    "odd_degree_vertices",
    "unite",
    "eulerian_circuit",
    "shortcut",
    "christofides_tour",
]


@dataclass(frozen=True)
class SpanningTree:
    """A spanning tree as a sorted list of (u, v) edges with u < v."""

    n: int
    edges: tuple[tuple[int, int], ...]
    weight: float

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=int)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg


@dataclass(frozen=True)
class EvenMultiGraph:
    """Multigraph with all degrees even; adjacency lists carry multiplicity."""

    n: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if any(len(nbrs) % 2 for nbrs in self.adjacency):
            raise ValueError("multigraph has a vertex of odd degree")

    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency) // 2


@dataclass(frozen=True)
class ConstructionTrace:
    """Weights and lengths recorded along the construction pipeline."""

    mst_weight: float
    matching_weight: float
    odd_vertex_count: int
    walk_length: float
    tour_length: float
    metric_warning: bool = False
    greedy_matching: bool = False


def minimum_spanning_tree(d: DistanceMatrix) -> SpanningTree:
    """Kruskal MST; edge ties resolve to the smallest (u, v) pair."""
    if not d.symmetric:
        raise ValueError("MST requires a symmetric matrix")
    n = d.n
    iu, iv = np.triu_indices(n, k=1)
    w = d.costs[iu, iv]
    order = np.lexsort((iv, iu, w))
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges: list[tuple[int, int]] = []
    weight = 0.0
    for idx in order:
        u, v = int(iu[idx]), int(iv[idx])
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            edges.append((u, v))
            weight += float(w[idx])
            if len(edges) == n - 1:
                break
    return SpanningTree(n=n, edges=tuple(sorted(edges)), weight=weight)


def odd_degree_vertices(t: SpanningTree) -> tuple[int, ...]:
    """Vertices with odd degree in the tree (always an even count)."""
    deg = t.degrees()
    return tuple(int(v) for v in np.flatnonzero(deg % 2 == 1))


def unite(t: SpanningTree, m: Matching) -> EvenMultiGraph:
    """Union of tree and matching edges as a multigraph (all degrees even)."""
    if m.vertices() != odd_degree_vertices(t):
        raise RuntimeError("matching does not cover exactly the tree's odd-degree vertices")
    adj: list[list[int]] = [[] for _ in range(t.n)]
    for u, v in list(t.edges) + list(m.pairs):
        adj[u].append(v)
        adj[v].append(u)
    return EvenMultiGraph(n=t.n, adjacency=tuple(tuple(sorted(a)) for a in adj))


def eulerian_circuit(g: EvenMultiGraph) -> list[int]:
    """Closed walk using every edge exactly once (Hierholzer).

    Starts at the lowest-index non-isolated vertex; the next edge is always
    the lowest-index remaining neighbor.
    """
    remaining = [list(nbrs) for nbrs in g.adjacency]
    start = next((v for v in range(g.n) if remaining[v]), None)
    if start is None:
        raise RuntimeError("multigraph has no edges")
    stack = [start]
    walk: list[int] = []
    while stack:
        v = stack[-1]
        if remaining[v]:
            u = remaining[v].pop(0)
            remaining[u].remove(v)
            stack.append(u)
        else:
            walk.append(stack.pop())
    if len(walk) != g.edge_count() + 1:
        raise RuntimeError("multigraph is not connected on its non-isolated vertices")
    walk.reverse()
    return walk


def shortcut(walk: list[int], d: DistanceMatrix) -> Tour:
    """Hamiltonian tour from a closed walk by keeping first occurrences."""
    seen = [False] * d.n
    order: list[int] = []
    for v in walk:
        if not seen[v]:
            seen[v] = True
            order.append(v)
    if len(order) != d.n:
        raise RuntimeError("walk does not visit every node")
    return Tour(order=tuple(order))


def walk_length(walk: list[int], d: DistanceMatrix) -> float:
    return float(sum(d.costs[walk[k], walk[k + 1]] for k in range(len(walk) - 1)))


def christofides_tour(
    d: DistanceMatrix,
    matching_mode: str = "exact",
    check_metric: bool = True,
    metric_tol: float = 1e-9,
) -> tuple[Tour, ConstructionTrace]:
    """Full construction pipeline with a per-stage trace.

    Non-metric inputs are processed anyway; the trace's metric_warning flag
    records that the 1.5 guarantee is void (as it also is in greedy
    matching mode).
    """
    if d.n < 3:
        raise ValueError("construction requires n >= 3")
    if matching_mode not in ("exact", "greedy"):
        raise ValueError(f"unknown matching mode: {matching_mode}")
    metric_warning = False
    if check_metric:
        ok, _ = triangle_inequality_holds(d, tol=metric_tol)
        metric_warning = not ok

    tree = minimum_spanning_tree(d)
    odd = odd_degree_vertices(tree)
    if matching_mode == "greedy":
        m = greedy_matching(d, odd)
    else:
        m = min_weight_perfect_matching(d, odd)
    multi = unite(tree, m)
    walk = eulerian_circuit(multi)
    tour = shortcut(walk, d)
    length = tour_length(tour, d)
    trace = ConstructionTrace(
        mst_weight=tree.weight,
        matching_weight=m.weight,
        odd_vertex_count=len(odd),
        walk_length=walk_length(walk, d),
        tour_length=length,
        metric_warning=metric_warning,
        greedy_matching=(matching_mode == "greedy"),
    )
    return Tour(order=tour.order, cached_length=length), trace
