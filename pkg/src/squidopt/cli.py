"""Command-line entry point: ``squidopt run|trace|suite|list-functions``.

Exit codes: 0 success, 2 configuration error, 3 run aborted by a
non-finite objective value.
"""
from __future__ import annotations

import argparse
import sys

from .benchmarks import REGISTRY, registry_lookup
from .core import ParameterError
from .harness import (
    ALGORITHMS,
    ConfigError,
    ExperimentConfig,
    configs_from_text,
    export_results,
    export_trace,
    run_experiment,
    run_suite,
    run_trial,
)

EXIT_OK, EXIT_CONFIG, EXIT_ABORT = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _algos(value):
    if value == "all":
        return ALGORITHMS
    items = tuple(v.strip() for v in value.split(",") if v.strip())
    for a in items:
        if a not in ALGORITHMS:
            raise argparse.ArgumentTypeError(f"unknown algorithm {a!r}")
    return items


def build_parser():
    parser = _Parser(prog="squidopt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="repeated seeded trials on one function")
    run.add_argument("--function", required=True, choices=sorted(REGISTRY))
    run.add_argument("--dim", type=int)
    run.add_argument("--algo", type=_algos, default=ALGORITHMS, help="ssa, pso, ga, a comma list or all")
    run.add_argument("--trials", type=int, default=100)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--budget-evals", type=int, default=50_000)
    run.add_argument("--budget-secs", type=float)
    run.add_argument("--tolerance", type=float, default=5e-7)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--out", help="CSV summary path")
    run.add_argument("--json", help="JSON results path")

    trace = sub.add_parser("trace", help="record every candidate's path for one run")
    trace.add_argument("--function", required=True, choices=sorted(REGISTRY))
    trace.add_argument("--dim", type=int)
    trace.add_argument("--algo", required=True, choices=ALGORITHMS)
    trace.add_argument("--seed", type=int, default=0)
    trace.add_argument("--budget-evals", type=int, default=50_000)
    trace.add_argument("--out", required=True)

    suite = sub.add_parser("suite", help="run a config file of experiments")
    suite.add_argument("--config", required=True)
    suite.add_argument("--out-dir", required=True)

    sub.add_parser("list-functions", help="print the benchmark registry")
    return parser


def _print_table(exp, out):
    print(f"{exp.config.function} (d={exp.dim}), {exp.config.trials} trials, "
          f"optimum {exp.optimum_value:.6g}", file=out)
    print(f"{'algo':<5} {'best':>12} {'worst':>12} {'mean':>12} {'std':>12} {'success':>8} rank",
          file=out)
    for r in exp.results:
        s = r.stats
        print(f"{r.algorithm:<5} {s.best:12.4e} {s.worst:12.4e} {s.mean:12.4e} {s.std_dev:12.4e} "
              f"{s.success_rate:8.2%} {r.rank:>4}", file=out)
    if exp.config.trials == 1:
        print("note: one trial, std reported as 0", file=out)


def _cmd_run(args, out):
    config = ExperimentConfig(function=args.function, dim=args.dim, algorithms=args.algo,
                              trials=args.trials, base_seed=args.seed,
                              budget_evals=args.budget_evals, budget_secs=args.budget_secs,
                              success_tolerance=args.tolerance, workers=args.workers)
    exp = run_experiment(config)
    _print_table(exp, out)
    if args.out:
        export_results(exp, "csv", args.out)
    if args.json:
        export_results(exp, "json", args.json)
    failed = sum(o.failed for r in exp.results for o in r.outcomes)
    if failed:
        print(f"{failed} trial(s) aborted on a non-finite objective value", file=sys.stderr)
        return EXIT_ABORT
    return EXIT_OK


def _cmd_trace(args, out):
    config = ExperimentConfig(function=args.function, dim=args.dim, algorithms=(args.algo,),
                              trials=1, base_seed=args.seed, budget_evals=args.budget_evals)
    result, error = run_trial(config, args.algo, 0, trace=True)
    if error:
        print(error, file=sys.stderr)
        return EXIT_ABORT
    export_trace(result, args.out)
    print(f"{len(result.trace)} rows, best {result.best_fitness:.6g} -> {args.out}", file=out)
    return EXIT_OK


def _cmd_suite(args, out):
    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {args.config}: {exc.strerror}") from exc
    results, summary = run_suite(configs_from_text(text), args.out_dir)
    for exp in results:
        _print_table(exp, out)
        print(file=out)
    print("algo  avg-rank final success", file=out)
    for a, avg, fin, sr in zip(summary.algorithms, summary.average_rank, summary.final_rank,
                               summary.success_rate):
        print(f"{a:<5} {avg:8.2f} {fin:5d} {sr:8.2%}", file=out)
    failed = sum(o.failed for exp in results for r in exp.results for o in r.outcomes)
    return EXIT_ABORT if failed else EXIT_OK


def _cmd_list(args, out):
    print(f"{'name':<16} {'dim':>5}  {'bounds':<20} optimum", file=out)
    for name, spec in REGISTRY.items():
        obj = registry_lookup(name)
        dim = f"{spec.default_dim}" if spec.fixed_dim else f"{spec.default_dim}*"
        bounds = f"[{spec.low:g}, {spec.high:g}]"
        print(f"{name:<16} {dim:>5}  {bounds:<20} {obj.optimum_value:.6g}", file=out)
    print("* default dimension; override with --dim", file=out)
    return EXIT_OK


_COMMANDS = {"run": _cmd_run, "trace": _cmd_trace, "suite": _cmd_suite,
             "list-functions": _cmd_list}


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args, out)
    except (ConfigError, ParameterError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
