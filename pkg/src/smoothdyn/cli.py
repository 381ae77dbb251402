"""Command-line front-end: simulate | bench | reduce | verify."""

from __future__ import annotations

import argparse
import sys
import time
from typing import List, Optional

from .harness import (
    ExperimentConfig,
    MetricRow,
    cmd_bench,
    cmd_reduce,
    cmd_simulate,
    cmd_verify,
    write_metrics,
)


def _emit(rows: List[MetricRow], out: Optional[str], elapsed_s: float, timings_out) -> None:
    if out:
        with open(out, "w", newline="") as fp:
            write_metrics(rows, fp)
    else:
        write_metrics(rows, sys.stdout)
    if timings_out:
        with open(timings_out, "w") as fp:
            fp.write("metric,value\n")
            fp.write(f"wall_time_s,{elapsed_s!r}\n")


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON config file; flags override its fields")
    sub.add_argument("--seed", type=int, help="64-bit experiment seed")
    sub.add_argument("--out", help="CSV output path (default: stdout)")
    sub.add_argument("--threads", type=int, help="worker processes for trials")
    sub.add_argument("--timings", dest="timings_out", help="separate wall-time CSV")
    sub.add_argument("--problem")
    sub.add_argument("--model", choices=["oblivious-flip", "oblivious-ar", "adaptive"])
    sub.add_argument("-n", type=int, dest="n")
    sub.add_argument("-p", type=float, dest="p")
    sub.add_argument("-T", type=int, dest="T")
    sub.add_argument("--trials", type=int)
    sub.add_argument("--query-every", type=int, dest="query_every")


def _build_config(args: argparse.Namespace) -> ExperimentConfig:
    config = (
        ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    )
    overrides = {
        key: getattr(args, key, None)
        for key in (
            "problem", "model", "n", "p", "T", "trials", "seed",
            "query_every", "out", "threads", "timings_out", "mode",
        )
        if hasattr(args, key)
    }
    if getattr(args, "p_grid", None):
        config.p_grid = [float(x) for x in args.p_grid.split(",")]
    return config.override(**overrides).validate()


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="smoothdyn",
        description="Smoothed dynamic-graph counters, embeddings, and reductions.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sim = subs.add_parser("simulate", help="drive a counter/decider against the oracle")
    _add_common(sim)

    bench = subs.add_parser("bench", help="amortized update-cost profile over a p grid")
    _add_common(bench)
    bench.add_argument("--p-grid", dest="p_grid", help="comma-separated p values")

    red = subs.add_parser("reduce", help="run a reduction experiment")
    _add_common(red)
    red.add_argument("--mode", choices=["sol", "p3general", "omv-chain"], default=None)

    subs.add_parser("verify", help="run the pinned-seed invariant battery").add_argument(
        "--seed", type=int, default=0
    )

    args = parser.parse_args(argv)

    if args.command == "verify":
        failures = 0
        for suite, passed, detail in cmd_verify(args.seed):
            status = "PASS" if passed else "FAIL"
            print(f"[{status}] {suite}: {detail}")
            failures += not passed
        return 1 if failures else 0

    try:
        config = _build_config(args)
    except (ValueError, OSError) as exc:
        parser.error(str(exc))
        return 2  # unreachable; parser.error exits

    start = time.perf_counter()
    if args.command == "simulate":
        rows = cmd_simulate(config)
        ok = True
    elif args.command == "bench":
        rows = cmd_bench(config)
        ok = True
    else:
        rows, ok = cmd_reduce(config)
    elapsed = time.perf_counter() - start
    _emit(rows, config.out, elapsed, config.timings_out)
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
