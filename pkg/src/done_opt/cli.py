"""Command-line entry point ``done``.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .benchmarks import BENCHMARKS
from .engine import DoneConfig, NonFiniteMeasurement, per_iteration_cost_probe
from .experiment import ConfigError, ExperimentConfig, run_experiment
from .lbfgsb import Box, NonFiniteError
from .validation import SUITES, run_suite

log = logging.getLogger("done_opt")

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _checkpoints(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"checkpoints must be comma-separated integers, got {text!r}") from None
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("checkpoints must be positive iteration numbers")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="done", description="Online derivative-free optimization with random Fourier expansions.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run a benchmark experiment from a JSON config")
    r.add_argument("--config", required=True, help="JSON config file")
    r.add_argument("--benchmark", help=f"override benchmark ({', '.join(sorted(BENCHMARKS))})")
    r.add_argument("--seed", type=int, help="override base seed")
    r.add_argument("--out", help="override output directory")
    r.add_argument("--reps", type=int, help="override number of repetitions")

    v = sub.add_parser("validate-theory", help="Monte-Carlo checks of the approximation theory")
    v.add_argument("--suite", default="all", choices=["all", *SUITES], help="suite to run (default: all)")

    c = sub.add_parser("probe-cost", help="per-iteration update time at several iteration counts")
    c.add_argument("--D", type=int, required=True, help="number of features")
    c.add_argument("--checkpoints", type=_checkpoints, required=True, help="comma-separated iteration numbers")
    c.add_argument("--window", type=int, default=1000, help="iterations averaged per checkpoint")
    c.add_argument("--d", type=int, default=2, help="input dimension of the trivial objective")
    c.add_argument("--metric", default="update", choices=["update", "solve", "iteration"])
    return p


def _cmd_run(args) -> int:
    overrides = {"benchmark": args.benchmark, "seed": args.seed, "out": args.out, "reps": args.reps}
    cfg = ExperimentConfig.load(args.config, overrides)

    def progress(rep, rec):
        if rec.n % 100 == 0 or rec.n == cfg.N:
            log.info("rep %d iteration %d y=%.6g ghat=%.6g", rep, rec.n, rec.y, rec.ghat)

    summary = run_experiment(cfg, progress)
    print(json.dumps({k: summary[k] for k in ("median_final_value", "median_final_distance", "timing")}, indent=2))
    return EXIT_OK


def _cmd_validate(args) -> int:
    def report(c):
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}", flush=True)

    results = run_suite(args.suite, report)
    failed = [c for c in results if not c.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_OK if not failed else EXIT_RUNTIME


def _cmd_probe(args) -> int:
    if args.D < 1 or args.window < 1 or args.d < 1:
        raise ConfigError("--D, --window and --d must be positive")
    cfg = DoneConfig(d=args.d, D=args.D, lam=1.0, box=Box(-1.0, 1.0, args.d), N=1)
    rows = per_iteration_cost_probe(cfg, args.checkpoints, args.window, args.metric)
    print("n,mean_seconds")
    for n, t in rows:
        print(f"{n},{t:.6e}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    handler = {"run": _cmd_run, "validate-theory": _cmd_validate, "probe-cost": _cmd_probe}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"done: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NonFiniteMeasurement, NonFiniteError, OSError, ValueError, FloatingPointError) as exc:
        print(f"done: run failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
