"""Command line: ``hees run`` executes experiment batches, ``hees ecdf``
and ``hees median`` aggregate a finished run directory."""
from __future__ import annotations

import argparse
import sys

from .harness import (
    ExperimentConfig,
    compute_ecdf,
    default_budget_grid,
    load_config,
    load_traces,
    median_trajectory,
    run_experiment,
    summaries_from_traces,
    write_ecdf_csv,
    write_median_csv,
)
from .objectives import problem_names

__all__ = ["main"]


def _csv_floats(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip() != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one value")
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hees",
        description="Curvature-adapted evolution strategy and its benchmark harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a batch of seeded optimization runs")
    run.add_argument("--function", required=True, choices=problem_names())
    run.add_argument("--dim", type=int, required=True)
    run.add_argument("--budget", type=int, required=True, help="evaluations per run")
    run.add_argument("--runs", type=int, default=1)
    run.add_argument("--seed", type=int, default=0, help="seed of run 0; run k uses seed+k")
    run.add_argument("--target", type=float, default=1e-8, help="stopping target value")
    run.add_argument("--sigma0", type=float, default=1.0)
    run.add_argument("--m0", type=_csv_floats, default=None, metavar="CSV",
                     help="start mean; default draws uniformly from [-4,4]^dim per run")
    run.add_argument("--lambda-pairs", type=int, default=None, dest="lambda_pairs",
                     help="mirrored pairs per generation")
    run.add_argument("--kappa", type=float, default=3.0)
    run.add_argument("--eta-a", type=float, default=0.5, dest="eta_a")
    run.add_argument("--ipop", action="store_true",
                     help="restart with doubled population on fitness-std convergence")
    run.add_argument("--stop-fitness-std", type=float, default=None,
                     help="override the fitness-std stop (default: disabled, or 1e-9 with --ipop)")
    run.add_argument("--instance-seed", type=int, default=None,
                     help="rotation instance for ellipsoid/discus/cigar")
    run.add_argument("--out", default="hees_out", help="output directory")
    run.add_argument("--format", default="csv", choices=("csv",), dest="fmt")

    ecdf = sub.add_parser("ecdf", help="runtime ECDF over (run, target) pairs")
    ecdf.add_argument("--in", dest="in_dir", required=True, help="run directory")
    ecdf.add_argument("--targets", type=_csv_floats, required=True, metavar="CSV")
    ecdf.add_argument("--out", required=True, help="output CSV file")

    median = sub.add_parser("median", help="median trace column across runs")
    median.add_argument("--in", dest="in_dir", required=True, help="run directory")
    median.add_argument("--field", required=True,
                        help="trace column, e.g. distance-to-optimum, cond_C, sigma, best_f")
    median.add_argument("--out", required=True, help="output CSV file")

    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    config = ExperimentConfig(
        function=args.function,
        dim=args.dim,
        budget=args.budget,
        runs=args.runs,
        seed=args.seed,
        targets=(args.target,),
        sigma0=args.sigma0,
        m0=args.m0,
        pair_count=args.lambda_pairs,
        kappa=args.kappa,
        eta_a=args.eta_a,
        ipop=args.ipop,
        stop_fitness_std=args.stop_fitness_std,
        instance_seed=args.instance_seed,
        out_dir=args.out,
        fmt=args.fmt,
    )
    archive = run_experiment(config)
    for summary in archive.summaries:
        print(
            "run {run}: {termination_reason} best_f={best_f:.6g} "
            "evals={evals_used} restarts={restart_count}".format(**summary)
        )
    print(f"wrote {len(archive.trace_paths)} trace(s) to {archive.out_dir}")
    return 0


def _cmd_ecdf(args: argparse.Namespace) -> int:
    traces = load_traces(args.in_dir)
    config = load_config(args.in_dir)
    summaries = summaries_from_traces(traces, args.targets)
    curve = compute_ecdf(summaries, args.targets, default_budget_grid(config.budget))
    write_ecdf_csv(args.out, curve)
    print(f"wrote ECDF over {len(traces)} run(s) x {len(args.targets)} target(s) to {args.out}")
    return 0


def _cmd_median(args: argparse.Namespace) -> int:
    traces = load_traces(args.in_dir)
    t, values = median_trajectory(traces, args.field)
    write_median_csv(args.out, t, values, args.field)
    print(f"wrote median {args.field} over {len(traces)} run(s) to {args.out}")
    return 0


_COMMANDS = {"run": _cmd_run, "ecdf": _cmd_ecdf, "median": _cmd_median}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
