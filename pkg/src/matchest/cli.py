"""Command-line interface.

Subcommands:
  estimate      estimate the maximum matching size of a graph
  scaling       probe-count scaling study over increasing sizes
  kernel-bench  wall-time comparison of the pure and compiled kernels

Exit codes: 0 success, 2 validation error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

from ._kernel import KERNEL_IMPL
from .bench import (
    CLI_MODES,
    SCALING_ALGORITHMS,
    kernel_benchmark,
    run_experiment,
    scaling_study,
)
from .estimator import EstimatorConfig
from .exact import NonBipartiteError
from .generators import FAMILIES, GeneratorSpec, InfeasibleSpecError, generate
from .graph import GraphParseError, GraphValidationError, load_graph

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matchest",
        description="Maximum matching size estimation under query oracles "
                    f"(active kernel: {KERNEL_IMPL})")
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="estimate matching size of a graph")
    src = est.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", help="edge-list file ('n m' header + 'u v' lines)")
    src.add_argument("--gen", help="generator spec, e.g. 'erdos-renyi:n=200,p=0.05'")
    est.add_argument("--mode", choices=sorted(CLI_MODES), default="bipartite")
    est.add_argument("--epsilon", type=float, default=0.5,
                     help="approximation knob (sets k when --k is absent)")
    est.add_argument("--k", type=int, default=None, help="explicit capacity base k")
    est.add_argument("--seed", type=int, default=0)
    est.add_argument("--trials", type=int, default=1)
    est.add_argument("--exact-reference", action="store_true",
                     help="materialize exact route quantities (small graphs)")
    out = est.add_mutually_exclusive_group()
    out.add_argument("--json", metavar="OUT", nargs="?", const="-",
                     help="write JSON report(s) to OUT (default stdout)")
    out.add_argument("--csv", metavar="OUT", help="write experiment CSV to OUT")

    sca = sub.add_parser("scaling", help="probe-count scaling study")
    sca.add_argument("--family", choices=sorted(FAMILIES), default="erdos-renyi")
    sca.add_argument("--sizes", required=True,
                     help="comma-separated strictly increasing sizes (>= 4)")
    sca.add_argument("--trials", type=int, default=3)
    sca.add_argument("--algorithm", choices=SCALING_ALGORITHMS,
                     default="estimator")
    sca.add_argument("--seed", type=int, default=0)
    sca.add_argument("--csv", metavar="OUT", help="write per-size medians to OUT")

    ker = sub.add_parser("kernel-bench",
                         help="compare pure vs compiled kernel wall time")
    ker.add_argument("--sizes", default="1000,4000",
                     help="comma-separated sizes (default 1000,4000)")
    ker.add_argument("--trials", type=int, default=3)
    ker.add_argument("--seed", type=int, default=0)
    return parser


def _load_input_graph(args):
    if args.graph is not None:
        with open(args.graph) as fh:
            return load_graph(fh)
    return generate(GeneratorSpec.parse(args.gen, seed=args.seed))


def _cmd_estimate(args) -> int:
    g = _load_input_graph(args)
    cfg = EstimatorConfig(eps=args.epsilon, k=args.k,
                          mode=CLI_MODES.get(args.mode, args.mode),
                          exact_reference=args.exact_reference)
    if args.csv is not None:
        if args.gen is None:
            raise GraphValidationError(
                "--csv experiment output needs --gen (spec echo in rows)")
        spec = GeneratorSpec.parse(args.gen, seed=args.seed)
        run_experiment([spec], [args.mode], args.trials, out_path=args.csv,
                       cfg=cfg)
        return EXIT_OK
    from .bench import _run_one
    from .rng import derive_seed
    reports = []
    for trial in range(args.trials):
        seed = derive_seed(args.seed, trial)
        est, stats, wall = _run_one(g, args.mode, cfg, seed)
        reports.append({
            "estimate": est,
            "mode": args.mode,
            "seed": seed,
            "trial": trial,
            "n": g.n,
            "m": g.m,
            "probes": stats.snapshot(include_per_vertex=False),
            "wall_time_ms": wall,
        })
    payload = reports[0] if args.trials == 1 else reports
    text = json.dumps(payload, indent=2)
    if args.json in (None, "-"):
        print(text)
    else:
        with open(args.json, "w") as fh:
            fh.write(text + "\n")
    return EXIT_OK


def _cmd_scaling(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    report = scaling_study(args.family, sizes, args.trials,
                           algorithm=args.algorithm, base_seed=args.seed,
                           csv_out=args.csv)
    print(f"family={report.family} algorithm={report.algorithm}")
    for n, med in report.points:
        print(f"  n={n:>8}  median_list_probes={med:,.0f}")
    print(f"slope={report.slope:.4f} intercept={report.intercept:.4f}")
    return EXIT_OK


def _cmd_kernel_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    records = kernel_benchmark(sizes, trials=args.trials, base_seed=args.seed)
    for rec in records:
        parts = [f"{rec['phase']:>9} n={rec['n']:>8}"]
        if "pure" in rec:
            parts.append(f"pure={rec['pure'] * 1000:9.2f}ms")
        if "compiled" in rec:
            parts.append(f"compiled={rec['compiled'] * 1000:9.2f}ms")
        if "speedup" in rec:
            parts.append(f"speedup={rec['speedup']:6.1f}x")
        print("  ".join(parts))
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "estimate":
            return _cmd_estimate(args)
        if args.command == "scaling":
            return _cmd_scaling(args)
        if args.command == "kernel-bench":
            return _cmd_kernel_bench(args)
        parser.error(f"unknown command {args.command!r}")
    except (GraphParseError, GraphValidationError, InfeasibleSpecError,
            NonBipartiteError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
