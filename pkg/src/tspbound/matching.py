"""Exact minimum-weight perfect matching on complete vertex subsets.

The heavy lifting is done by networkx's blossom implementation (O(n^3)).
For small vertex sets a bitmask dynamic program recomputes the optimum
with a deterministic lexicographic tie-break, so results are reproducible
even when several matchings share the minimum weight; the two methods are
cross-checked against each other on every call.
"""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx
import numpy as np

from .tours import DistanceMatrix

__all__ = ["MatchingError", "Matching", "min_weight_perfect_matching", "greedy_matching"]

# Below this size the lexicographic DP canonicalization runs (2^m states).
_CANONICAL_MAX = 16


class MatchingError(ValueError):
    """Invalid matching request (odd vertex set, bad indices)."""


@dataclass(frozen=True)
class Matching:
    """A perfect pairing of a vertex set; pairs stored as sorted (u, v), u < v."""

    pairs: tuple[tuple[int, int], ...]
    weight: float

    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted(v for pair in self.pairs for v in pair))


def _check_verts(d: DistanceMatrix, verts) -> list[int]:
    vs = sorted(int(v) for v in verts)
    if len(set(vs)) != len(vs):
        raise MatchingError("duplicate vertices in matching request")
    if len(vs) < 2 or len(vs) % 2 != 0:
        raise MatchingError(f"perfect matching needs an even vertex count >= 2, got {len(vs)}")
    if vs[0] < 0 or vs[-1] >= d.n:
        raise MatchingError(f"vertex out of range for n = {d.n}")
    return vs


def _blossom_pairs(d: DistanceMatrix, vs: list[int]) -> list[tuple[int, int]]:
    g = nx.Graph()
    g.add_nodes_from(vs)
    for a in range(len(vs)):
        for b in range(a + 1, len(vs)):
            g.add_edge(vs[a], vs[b], weight=float(d.costs[vs[a], vs[b]]))
    mate = nx.min_weight_matching(g)
    pairs = sorted(tuple(sorted(p)) for p in mate)
    if len(pairs) * 2 != len(vs):
        raise MatchingError("blossom matching failed to cover the vertex set")
    return pairs


def _canonical_pairs(d: DistanceMatrix, vs: list[int]) -> list[tuple[int, int]]:
    """Lexicographically-smallest optimal matching via subset DP."""
    m = len(vs)
    w = d.costs[np.ix_(vs, vs)]
    full = (1 << m) - 1
    best = np.full(1 << m, np.inf)
    best[0] = 0.0
    # iterate masks in increasing order; lowest set bit pairs with each partner
    for mask in range(1, full + 1):
        i = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << i)
        sub = rest
        b = np.inf
        while sub:
            j = (sub & -sub).bit_length() - 1
            cand = w[i, j] + best[rest ^ (1 << j)]
            if cand < b:
                b = cand
            sub &= sub - 1
        best[mask] = b
    # reconstruct, preferring the smallest partner index on exact ties
    pairs: list[tuple[int, int]] = []
    mask = full
    while mask:
        i = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << i)
        sub = rest
        chosen = None
        while sub:
            j = (sub & -sub).bit_length() - 1
            if w[i, j] + best[rest ^ (1 << j)] == best[mask]:
                chosen = j
                break
            sub &= sub - 1
        if chosen is None:  # float round-off between branches; take the closest
            sub, gap = rest, np.inf
            while sub:
                j = (sub & -sub).bit_length() - 1
                g = abs(w[i, j] + best[rest ^ (1 << j)] - best[mask])
                if g < gap:
                    gap, chosen = g, j
                sub &= sub - 1
        pairs.append((vs[i], vs[chosen]))
        mask = rest ^ (1 << chosen)
    return pairs


def min_weight_perfect_matching(d: DistanceMatrix, verts) -> Matching:
    """Exact minimum-weight perfect matching on the given vertex set.

    Ties are broken to the lexicographically smallest sorted pair list
    (guaranteed for vertex sets up to 16; larger sets return the blossom
    solution, which is still deterministic for a fixed input).
    """
    vs = _check_verts(d, verts)
    if len(vs) == 2:
        pairs = [(vs[0], vs[1])]
    else:
        pairs = _blossom_pairs(d, vs)
        if len(vs) <= _CANONICAL_MAX:
            canonical = _canonical_pairs(d, vs)
            w_blossom = sum(d.costs[u, v] for u, v in pairs)
            w_canon = sum(d.costs[u, v] for u, v in canonical)
            if abs(w_blossom - w_canon) > 1e-9 * max(1.0, abs(w_blossom)):
                raise MatchingError(
                    f"matching cross-check failed: blossom {w_blossom} vs DP {w_canon}"
                )
            pairs = sorted(canonical)
    weight = float(sum(d.costs[u, v] for u, v in pairs))
    return Matching(pairs=tuple(pairs), weight=weight)


def greedy_matching(d: DistanceMatrix, verts) -> Matching:
    """Approximate matching: repeatedly pair the closest available pair.

    No optimality guarantee; used as an escape hatch for very large
    instances.  Ties resolve to the smallest (u, v) pair.
    """
    vs = _check_verts(d, verts)
    free = set(vs)
    candidates = sorted(
        (float(d.costs[vs[a], vs[b]]), vs[a], vs[b])
        for a in range(len(vs))
        for b in range(a + 1, len(vs))
    )
    pairs: list[tuple[int, int]] = []
    for _, u, v in candidates:
        if u in free and v in free:
            pairs.append((u, v))
            free.discard(u)
            free.discard(v)
        if not free:
            break
    weight = float(sum(d.costs[u, v] for u, v in pairs))
    return Matching(pairs=tuple(sorted(pairs)), weight=weight)
