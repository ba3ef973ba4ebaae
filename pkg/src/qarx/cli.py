"""Command-line interface.

Subcommands:
  run          execute a configured experiment and write its artifacts
  summarize    re-aggregate an existing run directory
  feasibility  evaluate the penalty-slope intervals for a config's
               hypothesis block and locate the configured slopes in them
  plot         render order-trajectory figures from a run directory

Exit codes: 0 success, 1 invalid config, 2 runtime or I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .criterion import PenaltyInterval, ar_penalty_interval, exo_penalty_interval
from .experiment import (
    ConfigError,
    load_config,
    read_orders,
    records_from_results,
    run_experiment,
    format_summary,
    summarize,
    write_results,
    write_summary,
)

__all__ = ["main", "entry_point"]


def _cmd_run(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    results = run_experiment(config)
    paths = write_results(results, config)
    rows = summarize(records_from_results(results))
    print(format_summary(rows))
    paths["summary"] = write_summary(rows, config.output_dir)
    for name in ("orders", "criteria", "config", "summary"):
        if name in paths:
            print(f"wrote {paths[name]}")
    return 0


def _cmd_summarize(args: argparse.Namespace) -> int:
    records = read_orders(Path(args.dir) / "orders.csv")
    rows = summarize(records)
    print(format_summary(rows))
    path = write_summary(rows, args.dir)
    print(f"wrote {path}")
    return 0


def _locate(slope: float, interval: PenaltyInterval) -> str:
    if not interval.feasible:
        return "interval is empty"
    if slope < interval.lo:
        return "below lo"
    if slope > interval.hi:
        return "above hi"
    return "within [lo, hi]"


def _cmd_feasibility(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    if config.hypothesis is None:
        raise ConfigError("feasibility requires a 'hypothesis' block in the config")
    for axis, interval, slope, name in (
        ("p", ar_penalty_interval(config.hypothesis), config.slope_l, "slope_l"),
        ("q", exo_penalty_interval(config.hypothesis), config.slope_v, "slope_v"),
    ):
        print(
            f"axis {axis}: lo={interval.lo:.12g} hi={interval.hi:.12g} "
            f"feasible={'yes' if interval.feasible else 'no'} "
            f"{name}={slope:.12g} ({_locate(slope, interval)})"
        )
    return 0


def _cmd_plot(args: argparse.Namespace) -> int:
    from .plots import render_order_plots

    for path in render_order_plots(args.dir, out_dir=args.out):
        print(f"wrote {path}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qarx",
        description="Order estimation experiments for ARX systems with quantized outputs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a configured experiment")
    run.add_argument("--config", required=True, help="path to the JSON config file")
    run.set_defaults(func=_cmd_run)

    summ = sub.add_parser("summarize", help="re-aggregate a run directory")
    summ.add_argument("--dir", required=True, help="run directory containing orders.csv")
    summ.set_defaults(func=_cmd_summarize)

    feas = sub.add_parser("feasibility", help="evaluate penalty-slope intervals")
    feas.add_argument("--config", required=True, help="config file with a hypothesis block")
    feas.set_defaults(func=_cmd_feasibility)

    plot = sub.add_parser("plot", help="render order-trajectory figures")
    plot.add_argument("--dir", required=True, help="run directory containing orders.csv")
    plot.add_argument("--out", default=None, help="output directory (default: run directory)")
    plot.set_defaults(func=_cmd_plot)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary maps failures to exit code 2
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry_point() -> None:
    raise SystemExit(main())
