"""End-to-end solver pipeline, run reports and the benchmark harness.

A run builds a Christofides tour, iterates local-search passes, estimates
the support [A, B] of the length model (A = best lower reference,
B = max-tour estimate), fits the shape parameters from sampled local
optima and attaches the iterated-bound report.  Everything except
wall-clock timings is deterministic in (instance, config, seed).
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import bounds, kopt
from .christofides import ConstructionTrace, christofides_tour
from .instances import OptimaRegistry, TspInstance, cost_matrix, parse_tsplib
from .kopt import SearchConfig
from .tours import (
    BRUTE_FORCE_MAX_N,
    DistanceMatrix,
    Tour,
    brute_force_max_tour,
    brute_force_min_tour,
    maxtsp_transform,
    tour_length,
)

__all__ = [
    "SolveConfig",
    "RunReport",
    "BenchResult",
    "solve_instance",
    "estimate_max_tour",
    "bench",
    "emit_report",
    "parse_report",
    "REPORT_SCHEMA",
    "BENCH_PRESET",
]

# Benchmark preset: historically long-running TSPLIB instances.
BENCH_PRESET = ("fl1577", "fnl4461", "u1817", "pcb3038", "pla7397")

FLOAT_FORMAT = ".12g"


@dataclass(frozen=True)
class SolveConfig:
    """Pipeline configuration; exactly one of iterations / target_ratio."""

    search: SearchConfig = field(default_factory=SearchConfig)
    iterations: int | None = 1
    target_ratio: float | None = None
    matching_mode: str = "exact"
    sample_count: int = 30
    seed: int = 0

    def __post_init__(self):
        if (self.iterations is None) == (self.target_ratio is None):
            raise ValueError("exactly one of iterations / target_ratio must be set")
        if self.iterations is not None and self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.target_ratio is not None and self.target_ratio <= 1.0:
            raise ValueError("target_ratio must be > 1")
        if self.sample_count < 2:
            raise ValueError("sample_count must be >= 2")


@dataclass(frozen=True)
class RunReport:
    """Everything one solver run produced, ready for serialization."""

    instance: str
    dimension: int
    best_order: tuple[int, ...]
    best_length: float
    iteration_lengths: tuple[float, ...]
    trace: ConstructionTrace
    lower_ref: float
    lower_ref_source: str  # oracle | registry | best-found
    upper_ref: float
    upper_ref_source: str  # oracle | heuristic
    ratio_vs_lower: float
    fit: bounds.GbParams | None
    fit_error: str | None
    bound: bounds.BoundReport | None
    sample_count: int
    seed: int
    timings: dict[str, float]


def _lower_reference(
    d: DistanceMatrix, inst_name: str, registry: OptimaRegistry | None, best_found: float
) -> tuple[float, str]:
    if d.n <= BRUTE_FORCE_MAX_N:
        _, opt = brute_force_min_tour(d)
        return opt, "oracle"
    if registry is not None:
        known = registry.get(inst_name)
        if known is not None:
            return known, "registry"
    return best_found, "best-found"


def estimate_max_tour(d: DistanceMatrix, cfg: SolveConfig) -> tuple[float, str]:
    """Estimate of the maximum tour length B.

    Exact by enumeration for small instances; otherwise heuristic —
    minimize the flipped costs (offset - c) with the same construction +
    2-opt machinery and convert back through the n * offset identity.
    The flipped matrix is non-metric, so the construction runs with the
    metric warning raised; the estimate is a lower bound on the true max.
    """
    if d.n <= BRUTE_FORCE_MAX_N:
        _, best = brute_force_max_tour(d)
        return best, "oracle"
    tr = maxtsp_transform(d)
    flipped = tr.transformed()
    tour, _ = christofides_tour(flipped, matching_mode=cfg.matching_mode, check_metric=False)
    tour, _ = kopt.local_search(
        tour, flipped, SearchConfig(level=2, neighbor_count=cfg.search.neighbor_count,
                                    max_passes=cfg.search.max_passes, seed=cfg.seed)
    )
    return d.n * tr.offset - tour_length(tour, flipped), "heuristic"


def solve_instance(
    inst: TspInstance, cfg: SolveConfig, registry: OptimaRegistry | None = None
) -> RunReport:
    """Run the full pipeline on one instance."""
    timings: dict[str, float] = {}

    t0 = time.monotonic()
    d = DistanceMatrix(costs=cost_matrix(inst), symmetric=True)
    timings["matrix"] = time.monotonic() - t0

    t0 = time.monotonic()
    tour, trace = christofides_tour(d, matching_mode=cfg.matching_mode)
    timings["construction"] = time.monotonic() - t0

    t0 = time.monotonic()
    samples = kopt.sample_lengths(
        d, cfg.sample_count,
        SearchConfig(level=cfg.search.level, neighbor_count=cfg.search.neighbor_count,
                     max_passes=cfg.search.max_passes, seed=cfg.seed),
    )
    timings["sampling"] = time.monotonic() - t0

    t0 = time.monotonic()
    upper_ref, upper_src = estimate_max_tour(d, cfg)
    timings["max_tour"] = time.monotonic() - t0

    # fit needs [A, B]; A may later be replaced by the oracle/registry value
    best_found_cap = min(min(samples), trace.tour_length)
    lower_ref, lower_src = _lower_reference(d, inst.name, registry, best_found_cap)

    fit: bounds.GbParams | None = None
    fit_error: str | None = None
    try:
        fit = bounds.fit_params(samples, min(lower_ref, best_found_cap), upper_ref)
    except (bounds.FitError, bounds.DomainError) as exc:
        fit_error = str(exc)

    if cfg.iterations is not None:
        k = cfg.iterations
    elif fit is not None:
        k = bounds.iterations_for_target(fit.alpha, cfg.target_ratio)
    else:
        k = 1  # target mode without a usable fit degrades to construction only

    t0 = time.monotonic()
    nl = kopt.build_neighbor_lists(d, cfg.search.neighbor_count)
    lengths = [trace.tour_length]
    current = tour
    for _ in range(2, k + 1):
        current, improved = kopt.improvement_pass(current, d, nl, cfg.search.level)
        lengths.append(tour_length(current, d))
        if not improved:
            # converged; remaining iterations would repeat the same length
            lengths.extend([lengths[-1]] * (k - len(lengths)))
            break
    timings["local_search"] = time.monotonic() - t0

    best_length = lengths[-1]

    bound_report: bounds.BoundReport | None = None
    if fit is not None:
        states, clipped = bounds.iterate_bound(fit, k)
        bound_report = bounds.BoundReport(
            params=fit,
            states=states,
            closed_form=tuple(bounds.closed_form_ratio(fit.alpha, i) for i in range(1, k + 1)),
            target_ratio=cfg.target_ratio,
            required_k=(
                bounds.iterations_for_target(fit.alpha, cfg.target_ratio)
                if cfg.target_ratio is not None
                else None
            ),
            start_clipped=clipped,
        )

    return RunReport(
        instance=inst.name,
        dimension=inst.dimension,
        best_order=current.order,
        best_length=best_length,
        iteration_lengths=tuple(lengths),
        trace=trace,
        lower_ref=lower_ref,
        lower_ref_source=lower_src,
        upper_ref=upper_ref,
        upper_ref_source=upper_src,
        ratio_vs_lower=best_length / lower_ref if lower_ref > 0 else math.inf,
        fit=fit,
        fit_error=fit_error,
        bound=bound_report,
        sample_count=cfg.sample_count,
        seed=cfg.seed,
        timings=timings,
    )


@dataclass(frozen=True)
class BenchResult:
    reports: tuple[RunReport, ...]
    skipped: tuple[tuple[str, str], ...]  # (filename, reason)


def bench(
    directory: str | Path,
    cfg: SolveConfig,
    registry: OptimaRegistry | None = None,
    workers: int = 4,
) -> BenchResult:
    """Solve every parseable .tsp file in a directory.

    Unparseable files are reported as skipped, not fatal.  Instances run
    concurrently; results are ordered by instance name.
    """
    directory = Path(directory)
    files = sorted(directory.glob("*.tsp"))
    if not files:
        raise ValueError(f"no .tsp files found in {directory}")
    instances: list[TspInstance] = []
    skipped: list[tuple[str, str]] = []
    for f in files:
        try:
            instances.append(parse_tsplib(f.read_text()))
        except Exception as exc:  # noqa: BLE001 - skip and report
            skipped.append((f.name, str(exc)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        reports = list(pool.map(lambda inst: solve_instance(inst, cfg, registry), instances))
    reports.sort(key=lambda r: r.instance)
    return BenchResult(reports=tuple(reports), skipped=tuple(skipped))


def summary_rows(result: BenchResult, registry: OptimaRegistry | None = None) -> list[dict]:
    rows = []
    for r in result.reports:
        known = registry.get(r.instance) if registry is not None else None
        if r.lower_ref_source == "best-found":
            ratio = "n/a (A proxy = best-found)"
        else:
            ratio = _fmt(r.ratio_vs_lower)
        rows.append(
            {
                "name": r.instance,
                "n": r.dimension,
                "best_length": _fmt(r.best_length),
                "optimum": _fmt(known) if known is not None else "",
                "ratio": ratio,
                "time_total": _fmt(sum(r.timings.values())),
            }
        )
    return rows


# ---------------------------------------------------------------------------
# serialization

REPORT_SCHEMA = {
    "type": "object",
    "required": [
        "instance", "dimension", "best_order", "best_length", "iteration_lengths",
        "trace", "lower_ref", "lower_ref_source", "upper_ref", "upper_ref_source",
        "ratio_vs_lower", "fit", "fit_error", "bound", "sample_count", "seed", "timings",
    ],
    "properties": {
        "instance": {"type": "string"},
        "dimension": {"type": "integer", "minimum": 2},
        "best_order": {"type": "array", "items": {"type": "integer"}},
        "best_length": {"type": "number"},
        "iteration_lengths": {"type": "array", "items": {"type": "number"}},
        "trace": {
            "type": "object",
            "required": [
                "mst_weight", "matching_weight", "odd_vertex_count",
                "walk_length", "tour_length", "metric_warning", "greedy_matching",
            ],
        },
        "lower_ref": {"type": "number"},
        "lower_ref_source": {"enum": ["oracle", "registry", "best-found"]},
        "upper_ref": {"type": "number"},
        "upper_ref_source": {"enum": ["oracle", "heuristic"]},
        "ratio_vs_lower": {"type": "number"},
        "fit": {
            "type": ["object", "null"],
            "required": ["alpha", "beta", "lower", "upper", "shape_precondition_met"],
        },
        "fit_error": {"type": ["string", "null"]},
        "bound": {
            "type": ["object", "null"],
            "required": ["states", "closed_form", "target_ratio", "required_k", "start_clipped"],
        },
        "sample_count": {"type": "integer"},
        "seed": {"type": "integer"},
        "timings": {"type": "object"},
    },
}


def _fmt(x: float) -> float:
    """Round a float to 12 significant digits for stable output."""
    return float(format(float(x), FLOAT_FORMAT))


def report_to_dict(r: RunReport, include_timings: bool = True) -> dict:
    d = {
        "instance": r.instance,
        "dimension": r.dimension,
        "best_order": list(r.best_order),
        "best_length": _fmt(r.best_length),
        "iteration_lengths": [_fmt(x) for x in r.iteration_lengths],
        "trace": {
            "mst_weight": _fmt(r.trace.mst_weight),
            "matching_weight": _fmt(r.trace.matching_weight),
            "odd_vertex_count": r.trace.odd_vertex_count,
            "walk_length": _fmt(r.trace.walk_length),
            "tour_length": _fmt(r.trace.tour_length),
            "metric_warning": r.trace.metric_warning,
            "greedy_matching": r.trace.greedy_matching,
        },
        "lower_ref": _fmt(r.lower_ref),
        "lower_ref_source": r.lower_ref_source,
        "upper_ref": _fmt(r.upper_ref),
        "upper_ref_source": r.upper_ref_source,
        "ratio_vs_lower": _fmt(r.ratio_vs_lower),
        "fit": None,
        "fit_error": r.fit_error,
        "bound": None,
        "sample_count": r.sample_count,
        "seed": r.seed,
        "timings": {k: _fmt(v) for k, v in r.timings.items()} if include_timings else {},
    }
    if r.fit is not None:
        d["fit"] = {
            "alpha": _fmt(r.fit.alpha),
            "beta": _fmt(r.fit.beta),
            "lower": _fmt(r.fit.lower),
            "upper": _fmt(r.fit.upper),
            "shape_precondition_met": r.fit.shape_precondition_met,
        }
    if r.bound is not None:
        d["bound"] = {
            "states": [
                {"k": s.k, "truncation": _fmt(s.truncation), "mean": _fmt(s.mean)}
                for s in r.bound.states
            ],
            "closed_form": [_fmt(x) for x in r.bound.closed_form],
            "target_ratio": _fmt(r.bound.target_ratio) if r.bound.target_ratio else None,
            "required_k": r.bound.required_k,
            "start_clipped": r.bound.start_clipped,
        }
    return d


def report_from_dict(d: dict) -> RunReport:
    fit = None
    if d["fit"] is not None:
        fit = bounds.GbParams(
            alpha=d["fit"]["alpha"], beta=d["fit"]["beta"],
            lower=d["fit"]["lower"], upper=d["fit"]["upper"],
        )
    bound = None
    if d["bound"] is not None:
        bound = bounds.BoundReport(
            params=fit,
            states=tuple(
                bounds.TruncationState(k=s["k"], truncation=s["truncation"], mean=s["mean"])
                for s in d["bound"]["states"]
            ),
            closed_form=tuple(d["bound"]["closed_form"]),
            target_ratio=d["bound"]["target_ratio"],
            required_k=d["bound"]["required_k"],
            start_clipped=d["bound"]["start_clipped"],
        )
    t = d["trace"]
    return RunReport(
        instance=d["instance"],
        dimension=d["dimension"],
        best_order=tuple(d["best_order"]),
        best_length=d["best_length"],
        iteration_lengths=tuple(d["iteration_lengths"]),
        trace=ConstructionTrace(
            mst_weight=t["mst_weight"],
            matching_weight=t["matching_weight"],
            odd_vertex_count=t["odd_vertex_count"],
            walk_length=t["walk_length"],
            tour_length=t["tour_length"],
            metric_warning=t["metric_warning"],
            greedy_matching=t["greedy_matching"],
        ),
        lower_ref=d["lower_ref"],
        lower_ref_source=d["lower_ref_source"],
        upper_ref=d["upper_ref"],
        upper_ref_source=d["upper_ref_source"],
        ratio_vs_lower=d["ratio_vs_lower"],
        fit=fit,
        fit_error=d["fit_error"],
        bound=bound,
        sample_count=d["sample_count"],
        seed=d["seed"],
        timings=dict(d["timings"]),
    )


def emit_report(r: RunReport, fmt: str = "json", include_timings: bool = True) -> str:
    """Serialize a report; json round-trips, csv is a per-iteration summary."""
    if fmt == "json":
        return json.dumps(report_to_dict(r, include_timings=include_timings), indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["instance", "iteration", "length", "ratio_vs_lower", "lower_ref_source"])
        for i, length in enumerate(r.iteration_lengths, start=1):
            writer.writerow([
                r.instance, i, format(_fmt(length), FLOAT_FORMAT),
                format(_fmt(length / r.lower_ref), FLOAT_FORMAT), r.lower_ref_source,
            ])
        return buf.getvalue()
    raise ValueError(f"unknown report format: {fmt}")


def parse_report(text: str) -> RunReport:
    """Inverse of emit_report(..., fmt='json')."""
    return report_from_dict(json.loads(text))
