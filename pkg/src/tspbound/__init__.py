"""Metric-TSP heuristic solver with an approximation-bound calculus.

Christofides construction plus iterated k-opt local search, a scaled-beta
model of locally-optimal tour lengths, TSPLIB ingestion, brute-force
verification oracles and a benchmark harness.
"""

from .bounds import (
    BoundReport,
    GbParams,
    TruncationState,
    beta_fn,
    closed_form_ratio,
    fit_params,
    gb_pdf,
    hypergeometric_f,
    incomplete_beta,
    iterate_bound,
    iterations_for_target,
    truncated_mean,
)
from .christofides import christofides_tour, minimum_spanning_tree
from .estimator import TspHeuristicSolver
from .instances import (
    OptimaRegistry,
    TspInstance,
    cost_matrix,
    distance,
    load_optima,
    parse_tsplib,
    serialize_tsplib,
)
from .kopt import SearchConfig, local_search, sample_lengths
from .matching import Matching, min_weight_perfect_matching
from .pipeline import (
    BENCH_PRESET,
    RunReport,
    SolveConfig,
    bench,
    emit_report,
    parse_report,
    solve_instance,
)
from .tours import (
    DistanceMatrix,
    Tour,
    brute_force_max_tour,
    brute_force_min_tour,
    maxtsp_transform,
    random_tour,
    tour_length,
    triangle_inequality_holds,
)

__version__ = "0.1.0"
