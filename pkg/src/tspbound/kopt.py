"""2-opt / 3-opt local search with nearest-neighbor candidate lists.

First-improvement acceptance: each pass scans tour positions in order and
applies the first strictly improving exchange found at a position before
moving on.  Improvement must beat a small relative threshold so float
noise cannot cause oscillation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tours import DistanceMatrix, Tour, random_tour, tour_length

__all__ = [
    "NeighborLists",
    "SearchConfig",
    "build_neighbor_lists",
    "two_opt_improve",
    "three_opt_improve",
    "improvement_pass",
    "local_search",
    "sample_lengths",
]

# relative improvement threshold: moves must beat this fraction of the length
IMPROVE_EPS = 1e-12


@dataclass(frozen=True)
class NeighborLists:
    """Per-node nearest neighbors, sorted ascending by distance."""

    lists: tuple[tuple[int, ...], ...]

    @property
    def count(self) -> int:
        return len(self.lists[0]) if self.lists else 0


@dataclass(frozen=True)
class SearchConfig:
    """Local-search knobs: exchange order, candidate width, pass cap, seed."""

    level: int = 2
    neighbor_count: int = 10
    max_passes: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.level not in (2, 3):
            raise ValueError(f"level must be 2 or 3, got {self.level}")
        if self.max_passes < 1:
            raise ValueError("max_passes must be >= 1")
        if self.neighbor_count < 1:
            raise ValueError("neighbor_count must be >= 1")


def build_neighbor_lists(d: DistanceMatrix, count: int = 10) -> NeighborLists:
    """The `count` nearest neighbors of every node (ties by index)."""
    n = d.n
    m = min(count, n - 1)
    lists = []
    for i in range(n):
        row = d.costs[i].copy()
        row[i] = np.inf
        idx = np.lexsort((np.arange(n), row))[:m]
        lists.append(tuple(int(j) for j in idx))
    return NeighborLists(lists=tuple(lists))


def _threshold(length: float) -> float:
    return IMPROVE_EPS * max(1.0, abs(length))


def two_opt_improve(
    t: Tour, d: DistanceMatrix, nl: NeighborLists
) -> tuple[Tour, bool]:
    """One first-improvement 2-opt pass restricted to candidate neighbors."""
    if not d.symmetric:
        raise ValueError("2-opt requires a symmetric matrix")
    n = t.n
    if n < 4:
        return t, False
    order = list(t.order)
    pos = [0] * n
    for p, v in enumerate(order):
        pos[v] = p
    c = d.costs
    length = tour_length(t, d)
    improved = False
    for i in range(n):
        a, b = order[i], order[(i + 1) % n]
        for cand in nl.lists[a] + nl.lists[b]:
            j = pos[cand]
            lo, hi = (i, j) if i < j else (j, i)
            if lo == hi or hi - lo == 0 or (lo == 0 and hi == n - 1):
                continue
            p, q = order[lo], order[lo + 1]
            r, s = order[hi], order[(hi + 1) % n]
            if p == r or q == s:
                continue
            delta = (c[p, r] + c[q, s]) - (c[p, q] + c[r, s])
            if delta < -_threshold(length):
                order[lo + 1 : hi + 1] = reversed(order[lo + 1 : hi + 1])
                for pp in range(lo + 1, hi + 1):
                    pos[order[pp]] = pp
                length += delta
                improved = True
                break  # one move per scan position
    if not improved:
        return t, False
    return Tour(order=tuple(order), cached_length=tour_length(Tour(tuple(order)), d)), True


def _reconnections(s1: list[int], s2: list[int]):
    """The seven non-identity ways to reinsert two tour segments."""
    r1, r2 = s1[::-1], s2[::-1]
    yield r1 + s2
    yield s1 + r2
    yield r1 + r2
    yield s2 + s1
    yield r2 + s1
    yield s2 + r1
    yield r2 + r1


def three_opt_improve(
    t: Tour, d: DistanceMatrix, nl: NeighborLists
) -> tuple[Tour, bool]:
    """One first-improvement 3-opt pass (all 7 reconnection patterns).

    Cut positions are pruned through the candidate lists; with
    neighbor_count >= n - 1 the scan is exhaustive.  Each candidate is
    evaluated by rebuilding the tour, so a pass costs O(candidates * n).
    """
    if not d.symmetric:
        raise ValueError("3-opt requires a symmetric matrix")
    n = t.n
    if n < 5:
        return two_opt_improve(t, d, nl)
    order = list(t.order)
    length = tour_length(t, d)
    improved = False
    for i in range(n):
        pos = {v: p for p, v in enumerate(order)}
        a, b = order[i], order[(i + 1) % n]
        j_cands = sorted(
            {p for cand in nl.lists[a] + nl.lists[b] for p in (pos[cand] - 1, pos[cand])}
        )
        done = False
        for j in j_cands:
            if not i < j < n - 1:
                continue
            e, f = order[j], order[(j + 1) % n]
            k_cands = sorted(
                {p for cand in nl.lists[e] + nl.lists[f] for p in (pos[cand] - 1, pos[cand])}
            )
            for k in k_cands:
                if not j < k < n:
                    continue
                s1 = order[i + 1 : j + 1]
                s2 = order[j + 1 : k + 1]
                rest = order[k + 1 :] + order[: i + 1]
                for variant in _reconnections(s1, s2):
                    cand_order = rest + variant
                    cand_len = tour_length(Tour(tuple(cand_order)), d)
                    if cand_len < length - _threshold(length):
                        order = cand_order
                        length = cand_len
                        improved = True
                        done = True
                        break
                if done:
                    break
            if done:
                break
    if not improved:
        return t, False
    return Tour(order=tuple(order), cached_length=length), True


def improvement_pass(
    t: Tour, d: DistanceMatrix, nl: NeighborLists, level: int
) -> tuple[Tour, bool]:
    """One pass of the configured exchange order."""
    if level == 2:
        return two_opt_improve(t, d, nl)
    return three_opt_improve(t, d, nl)


def local_search(
    t: Tour, d: DistanceMatrix, cfg: SearchConfig
) -> tuple[Tour, int]:
    """Run improvement passes until a fixed point or the pass cap."""
    nl = build_neighbor_lists(d, cfg.neighbor_count)
    passes = 0
    current = t
    while passes < cfg.max_passes:
        current, improved = improvement_pass(current, d, nl, cfg.level)
        passes += 1
        if not improved:
            break
    return current, passes


def sample_lengths(d: DistanceMatrix, count: int, cfg: SearchConfig) -> list[float]:
    """Locally-optimal tour lengths from `count` independent random starts.

    Run r starts from the random tour seeded with cfg.seed + r, so the
    whole sample vector is deterministic in the config.
    """
    if count < 2:
        raise ValueError("need at least 2 samples to fit two moments")
    out = []
    for r in range(count):
        start = random_tour(d.n, cfg.seed + r)
        best, _ = local_search(start, d, cfg)
        out.append(tour_length(best, d))
    return out
