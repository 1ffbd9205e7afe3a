"""Scikit-learn style front end for the solver pipeline.

`TspHeuristicSolver.fit(X)` accepts either an (n, 2) coordinate array or
a precomputed (n, n) symmetric distance matrix and exposes the resulting
tour and bound report as fitted attributes, so the solver composes with
sklearn tooling (get_params / set_params / clone).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array

from .instances import EXACT, EUC_2D, EXPLICIT, TSPLIB_NINT, TspInstance
from .kopt import SearchConfig
from .pipeline import SolveConfig, solve_instance

__all__ = ["TspHeuristicSolver"]


class TspHeuristicSolver(BaseEstimator):
    """Christofides construction followed by iterated k-opt improvement.

    Parameters
    ----------
    metric : "euclidean" or "precomputed"
        Whether X holds 2-D coordinates or a full distance matrix.
    iterations : int or None
        Number of improvement iterations (the construction counts as
        iteration 1).  Mutually exclusive with target_ratio.
    target_ratio : float or None
        Derive the iteration count from the fitted shape parameter so the
        closed-form ratio drops below this target.
    level : int
        Exchange order of the local search, 2 or 3.
    neighbor_count : int
        Candidate-list width for the local search.
    matching : "exact" or "greedy"
        Perfect-matching mode inside the construction.
    rounding : "exact" or "nint"
        Distance rounding for coordinate input.
    sample_count : int
        Local-optimum samples used to fit the shape parameters.
    seed : int
        Seed for all randomized parts; runs are deterministic given it.

    Attributes (after fit)
    ----------
    tour_ : tuple[int, ...]
    length_ : float
    report_ : RunReport
    """

    def __init__(
        self,
        metric: str = "euclidean",
        iterations: int | None = 1,
        target_ratio: float | None = None,
        level: int = 2,
        neighbor_count: int = 10,
        matching: str = "exact",
        rounding: str = "exact",
        sample_count: int = 30,
        seed: int = 0,
    ):
        self.metric = metric
        self.iterations = iterations
        self.target_ratio = target_ratio
        self.level = level
        self.neighbor_count = neighbor_count
        self.matching = matching
        self.rounding = rounding
        self.sample_count = sample_count
        self.seed = seed

    def _instance(self, X) -> TspInstance:
        X = check_array(X, dtype=float, ensure_min_samples=3)
        if self.metric == "euclidean":
            if X.shape[1] != 2:
                raise ValueError(f"euclidean input must be (n, 2), got {X.shape}")
            rounding = TSPLIB_NINT if self.rounding == "nint" else EXACT
            return TspInstance(
                name="estimator-input", dimension=X.shape[0], weight_kind=EUC_2D,
                rounding=rounding, coords=tuple((float(x), float(y)) for x, y in X),
            )
        if self.metric == "precomputed":
            if X.shape[0] != X.shape[1]:
                raise ValueError(f"precomputed input must be square, got {X.shape}")
            if not np.allclose(X, X.T):
                raise ValueError("precomputed distance matrix must be symmetric")
            m = (X + X.T) / 2.0
            np.fill_diagonal(m, 0.0)
            return TspInstance(
                name="estimator-input", dimension=X.shape[0], weight_kind=EXPLICIT,
                rounding=EXACT, explicit_costs=tuple(tuple(row) for row in m),
            )
        raise ValueError(f"metric must be 'euclidean' or 'precomputed', got {self.metric!r}")

    def fit(self, X, y=None):
        """Solve the instance described by X; y is ignored."""
        inst = self._instance(X)
        cfg = SolveConfig(
            search=SearchConfig(level=self.level, neighbor_count=self.neighbor_count,
                                seed=self.seed),
            iterations=self.iterations,
            target_ratio=self.target_ratio,
            matching_mode=self.matching,
            sample_count=self.sample_count,
            seed=self.seed,
        )
        report = solve_instance(inst, cfg)
        self.report_ = report
        self.tour_ = report.best_order
        self.length_ = report.best_length
        return self

    def fit_predict(self, X, y=None):
        """Fit and return the tour as a node-index array."""
        return np.asarray(self.fit(X).tour_)
