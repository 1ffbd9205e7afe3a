"""Command-line interface.

Subcommands:
  solve   - run the full pipeline on one TSPLIB file
  bound   - evaluate the iterated bound for given shape parameters
  maxtsp  - estimate the maximum tour length of an instance
  bench   - run the pipeline over a directory of instances

Exit codes: 0 success, 2 usage/parse error, 3 numeric/fit error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import bounds
from .instances import (
    EXACT,
    TSPLIB_NINT,
    RegistryError,
    TsplibParseError,
    load_optima,
    parse_tsplib,
)
from .kopt import SearchConfig
from .pipeline import (
    SolveConfig,
    bench,
    emit_report,
    estimate_max_tour,
    solve_instance,
    summary_rows,
)
from .tours import DistanceMatrix
from .instances import cost_matrix

EXIT_USAGE = 2
EXIT_NUMERIC = 3


def _add_common_solver_args(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group()
    group.add_argument("--iterations", type=int, default=None, metavar="K")
    group.add_argument("--target-ratio", type=float, default=None, metavar="R")
    p.add_argument("--k", type=int, choices=(2, 3), default=2, help="exchange order")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--matching", choices=("exact", "greedy"), default="exact")
    p.add_argument("--rounding", choices=("nint", "exact"), default=None)
    p.add_argument("--neighbors", type=int, default=10, help="candidate-list width")
    p.add_argument("--samples", type=int, default=30, help="local optima sampled for the fit")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", type=Path, default=None)


def _solve_config(args) -> SolveConfig:
    iterations = args.iterations
    if iterations is None and args.target_ratio is None:
        iterations = 1
    return SolveConfig(
        search=SearchConfig(level=args.k, neighbor_count=args.neighbors, seed=args.seed),
        iterations=iterations,
        target_ratio=args.target_ratio,
        matching_mode=args.matching,
        sample_count=args.samples,
        seed=args.seed,
    )


def _read_instance(path: Path, rounding: str | None):
    inst = parse_tsplib(path.read_text())
    if rounding is not None:
        inst = inst.with_rounding(TSPLIB_NINT if rounding == "nint" else EXACT)
    return inst


def _write(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _cmd_solve(args) -> int:
    inst = _read_instance(args.file, args.rounding)
    report = solve_instance(inst, _solve_config(args))
    _write(emit_report(report, fmt=args.format), args.out)
    return 0


def _cmd_bound(args) -> int:
    params = bounds.GbParams(
        alpha=args.alpha, beta=args.beta, lower=args.lower, upper=args.upper
    )
    if args.target_ratio is not None:
        k = bounds.iterations_for_target(args.alpha, args.target_ratio)
    else:
        k = args.iterations if args.iterations is not None else 1
    states, clipped = bounds.iterate_bound(params, k)
    payload = {
        "alpha": args.alpha,
        "beta": args.beta,
        "lower": args.lower,
        "upper": args.upper,
        "shape_precondition_met": params.shape_precondition_met,
        "target_ratio": args.target_ratio,
        "iterations": k,
        "start_clipped": clipped,
        "states": [
            {"k": s.k, "truncation": s.truncation, "mean": s.mean} for s in states
        ],
        "closed_form": [bounds.closed_form_ratio(args.alpha, i) for i in range(1, k + 1)],
    }
    _write(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def _cmd_maxtsp(args) -> int:
    inst = _read_instance(args.file, None)
    d = DistanceMatrix(costs=cost_matrix(inst), symmetric=True)
    cfg = SolveConfig(search=SearchConfig(seed=args.seed), iterations=1, seed=args.seed)
    value, source = estimate_max_tour(d, cfg)
    _write(
        json.dumps(
            {"instance": inst.name, "max_tour_estimate": value, "source": source},
            indent=2,
        )
        + "\n",
        args.out,
    )
    return 0


def _cmd_bench(args) -> int:
    registry = load_optima(args.optima.read_text()) if args.optima else None
    result = bench(args.dir, _solve_config(args), registry)
    if args.format == "json":
        payload = {
            "reports": [json.loads(emit_report(r)) for r in result.reports],
            "skipped": [{"file": f, "reason": why} for f, why in result.skipped],
        }
        _write(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        buf = io.StringIO()
        rows = summary_rows(result, registry)
        writer = csv.DictWriter(
            buf, fieldnames=["name", "n", "best_length", "optimum", "ratio", "time_total"],
            lineterminator="\n",
        )
        writer.writeheader()
        writer.writerows(rows)
        for fname, why in result.skipped:
            buf.write(f"# skipped {fname}: {why}\n")
        _write(buf.getvalue(), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tspbound", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one TSPLIB instance")
    p.add_argument("file", type=Path)
    _add_common_solver_args(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("bound", help="evaluate the iterated bound only")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--lower", type=float, required=True)
    p.add_argument("--upper", type=float, required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--iterations", type=int, default=None, metavar="K")
    group.add_argument("--target-ratio", type=float, default=None, metavar="R")
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("maxtsp", help="estimate the maximum tour length")
    p.add_argument("file", type=Path)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=_cmd_maxtsp)

    p = sub.add_parser("bench", help="run over a directory of instances")
    p.add_argument("dir", type=Path)
    p.add_argument("--optima", type=Path, default=None)
    _add_common_solver_args(p)
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (TsplibParseError, RegistryError, FileNotFoundError, ValueError) as exc:
        if isinstance(exc, (bounds.FitError,)):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (bounds.NumericError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
