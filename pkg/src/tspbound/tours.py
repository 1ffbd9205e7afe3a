"""Tours, tour length, metric validation and small-instance oracles.

The brute-force enumerators are verification oracles: they exhaustively
scan every tour of a small instance (n <= 12) with a fixed lexicographic
tie-break, so heuristic results can be checked against exact optima.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DistanceMatrix",
    "Tour",
    "MaxTspTransform",
    "tour_length",
    "triangle_inequality_holds",
    "maxtsp_transform",
    "brute_force_min_tour",
    "brute_force_max_tour",
    "random_tour",
]

BRUTE_FORCE_MAX_N = 12


@dataclass(frozen=True)
class DistanceMatrix:
    """Edge cost matrix with zero diagonal."""

    costs: np.ndarray
    symmetric: bool = True

    def __post_init__(self):
        c = np.asarray(self.costs, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError(f"cost matrix must be square, got shape {c.shape}")
        if c.shape[0] < 2:
            raise ValueError("need at least 2 nodes")
        if np.any(np.diag(c) != 0.0):
            raise ValueError("diagonal must be zero")
        if np.any(c < 0) or not np.all(np.isfinite(c)):
            raise ValueError("costs must be finite and non-negative")
        if self.symmetric and not np.array_equal(c, c.T):
            raise ValueError("matrix flagged symmetric but is not")
        object.__setattr__(self, "costs", c)

    @property
    def n(self) -> int:
        return self.costs.shape[0]

    @classmethod
    def from_array(cls, costs) -> "DistanceMatrix":
        c = np.asarray(costs, dtype=float)
        return cls(costs=c, symmetric=bool(np.array_equal(c, c.T)))


@dataclass(frozen=True)
class Tour:
    """A cyclic visiting order: a permutation of 0..n-1."""

    order: tuple[int, ...]
    cached_length: float | None = None

    def __post_init__(self):
        n = len(self.order)
        if sorted(self.order) != list(range(n)):
            raise ValueError("tour order must be a permutation of 0..n-1")

    @property
    def n(self) -> int:
        return len(self.order)


@dataclass(frozen=True)
class MaxTspTransform:
    """Cost flip c -> M - c turning tour maximization into minimization."""

    offset: float
    base: DistanceMatrix

    def transformed(self) -> DistanceMatrix:
        c = self.offset - self.base.costs
        np.fill_diagonal(c, 0.0)
        return DistanceMatrix(costs=c, symmetric=self.base.symmetric)


def tour_length(t: Tour, d: DistanceMatrix) -> float:
    """Closed-tour length: sum of consecutive edge costs, wrapping around."""
    if t.n != d.n:
        raise ValueError(f"tour has {t.n} nodes but matrix has {d.n}")
    order = np.asarray(t.order)
    return float(d.costs[order, np.roll(order, -1)].sum())


def triangle_inequality_holds(
    d: DistanceMatrix, tol: float = 1e-9
) -> tuple[bool, tuple[int, int, int] | None]:
    """Check c_ij + c_jk >= c_ik - tol for all distinct triples.

    Returns (True, None) or (False, first violating (i, j, k)) scanning
    triples in lexicographic order.
    """
    c = d.costs
    n = d.n
    for i in range(n):
        # viol[j, k] <=> c_ij + c_jk < c_ik - tol
        viol = c[i, :, None] + c < c[i, None, :] - tol
        viol[i, :] = False
        viol[:, i] = False
        np.fill_diagonal(viol, False)
        if viol.any():
            j, k = np.argwhere(viol)[0]
            return False, (i, int(j), int(k))
    return True, None


def maxtsp_transform(d: DistanceMatrix) -> MaxTspTransform:
    """Transform with offset = max off-diagonal cost + 1."""
    if not d.symmetric:
        raise ValueError("max-tour transform requires a symmetric matrix")
    c = d.costs.copy()
    np.fill_diagonal(c, -math.inf)
    return MaxTspTransform(offset=float(c.max()) + 1.0, base=d)


_PERM_CACHE: dict[int, np.ndarray] = {}


def _all_orders(n: int) -> np.ndarray:
    """All (n-1)! tour orders starting at node 0, in lexicographic order."""
    perms = _PERM_CACHE.get(n)
    if perms is None:
        rest = np.array(list(itertools.permutations(range(1, n))), dtype=np.int64)
        perms = np.hstack([np.zeros((len(rest), 1), dtype=np.int64), rest])
        _PERM_CACHE[n] = perms
    return perms


def _brute_force(d: DistanceMatrix, maximize: bool) -> tuple[Tour, float]:
    n = d.n
    if not (3 <= n <= BRUTE_FORCE_MAX_N):
        raise ValueError(f"brute force requires 3 <= n <= {BRUTE_FORCE_MAX_N}, got {n}")
    if not d.symmetric:
        raise ValueError("brute-force oracles require a symmetric matrix")
    perms = _all_orders(n)
    lengths = np.zeros(len(perms))
    nxt = np.roll(np.arange(n), -1)
    for k in range(n):
        lengths += d.costs[perms[:, k], perms[:, nxt[k]]]
    best = lengths.max() if maximize else lengths.min()
    # first index achieving the optimum = lexicographically smallest order
    idx = int(np.argmax(lengths == best))
    order = tuple(int(v) for v in perms[idx])
    return Tour(order=order, cached_length=float(best)), float(best)


def brute_force_min_tour(d: DistanceMatrix) -> tuple[Tour, float]:
    """Exact minimum tour by exhaustive enumeration (n <= 12)."""
    return _brute_force(d, maximize=False)


def brute_force_max_tour(d: DistanceMatrix) -> tuple[Tour, float]:
    """Exact maximum tour by exhaustive enumeration (n <= 12)."""
    return _brute_force(d, maximize=True)


def random_tour(n: int, seed: int) -> Tour:
    """Uniform random permutation tour, deterministic in the seed."""
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    rng = np.random.default_rng(seed)
    return Tour(order=tuple(int(v) for v in rng.permutation(n)))
