"""Command-line front end: run, summarize, oracle.

`run` executes one seeded optimization and writes a trace; `summarize`
aggregates trace files into final-value statistics and mean curves;
`oracle` executes the brute-force verification suites. Config files are
JSON with the same nesting as RunConfig; command-line flags override
top-level fields. No environment variables are consulted.
"""
from __future__ import annotations

import argparse
import glob
import json
import sys
from typing import Optional, Sequence

from .benchmarks import benchmark_names
from .harness import OPTIMIZERS, RunConfig, emit_summary, read_trace, run
from .oracles import SUITES, run_suites


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphbo",
        description="Bayesian optimization over graph-structured "
                    "combinatorial spaces")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one seeded optimization run")
    p_run.add_argument("--benchmark", choices=benchmark_names())
    p_run.add_argument("--optimizer", choices=OPTIMIZERS)
    p_run.add_argument("--budget", type=int)
    p_run.add_argument("--n-init", type=int, dest="n_init")
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--out", help="trace CSV path (JSON sidecar beside it)")
    p_run.add_argument("--config", help="JSON file with RunConfig fields")

    p_sum = sub.add_parser("summarize", help="aggregate trace files")
    p_sum.add_argument("--in", dest="pattern", required=True,
                       help="glob pattern matching trace CSV files")
    p_sum.add_argument("--out", help="write the summary as JSON here")

    p_orc = sub.add_parser("oracle", help="run brute-force verification suites")
    p_orc.add_argument("--suite", choices=sorted(SUITES) + ["all"],
                       default="all")
    return parser


def _fail(exc) -> int:
    print(f"error: {exc}", file=sys.stderr)
    return 2


def _cmd_run(args) -> int:
    raw = {}
    if args.config:
        try:
            with open(args.config, "r", encoding="ascii") as fh:
                raw = json.load(fh)
        except (OSError, ValueError) as exc:
            return _fail(exc)
        if not isinstance(raw, dict):
            print("config file must hold a JSON object", file=sys.stderr)
            return 2
    for key in ("benchmark", "optimizer", "budget", "n_init", "seed", "out"):
        value = getattr(args, key)
        if value is not None:
            raw[key] = value
    missing = [k for k in ("benchmark", "budget", "seed") if k not in raw]
    if missing:
        print(f"missing required fields: {', '.join(missing)}", file=sys.stderr)
        return 2
    try:
        cfg = RunConfig.from_dict(raw)
        trace = run(cfg)
    except (ValueError, OSError) as exc:
        return _fail(exc)
    last = trace.records[-1]
    print(f"{cfg.benchmark} {cfg.optimizer} seed={cfg.seed}: "
          f"best={last.best_so_far!r} evaluations={last.iteration} "
          f"seconds={last.seconds:.2f} stop={trace.metadata['stop_reason']}")
    if cfg.out:
        print(f"trace written to {cfg.out}")
    return 0


def _cmd_summarize(args) -> int:
    paths = sorted(glob.glob(args.pattern))
    if not paths:
        print(f"no trace files match {args.pattern!r}", file=sys.stderr)
        return 2
    try:
        traces = [read_trace(p) for p in paths]
        summary = emit_summary(traces)
    except (ValueError, OSError) as exc:
        return _fail(exc)
    print(f"benchmark: {summary['benchmark']} ({len(traces)} traces)")
    for opt, stats in summary["groups"].items():
        print(f"  {opt}: n={stats['n_runs']} "
              f"final {stats['final_mean']:.6f} +- {stats['final_stderr']:.6f}")
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"summary written to {args.out}")
    return 0


def _cmd_oracle(args) -> int:
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    results = run_suites(names)
    failures = 0
    for name, ok, detail in results:
        tag = "PASS" if ok else "FAIL"
        failures += 0 if ok else 1
        print(f"{tag} {name}: {detail}")
    print(f"{len(results) - failures}/{len(results)} checks passed")
    return 0 if failures == 0 else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "summarize":
        return _cmd_summarize(args)
    return _cmd_oracle(args)


if __name__ == "__main__":
    sys.exit(main())
