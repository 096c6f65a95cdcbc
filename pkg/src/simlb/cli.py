"""Command-line entry point.

    simlb run --scenario s1 --balancer both --seed 42 --scale 0.02 --out out/s1
    simlb compare --a out/a --b out/b --out stats.csv

Exit codes: 0 success, 1 configuration error, 2 simulation invariant
violation.  Set SIMLB_TRACE=1 to dump per-event traces alongside each run.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .cloud import CostRates
from .engine import SimulationError
from .runner import (ConfigError, MismatchedSweeps, ScenarioConfig,
                     compare_directories, run_scenario)

CONFIG_KEYS = {"seed", "scale", "task_threshold", "floor_fraction",
               "queue_mode", "execution_model", "inter_batch_interval",
               "cost_rates", "reps", "dcs", "vms", "tasks"}


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"expected a comma-separated integer list, got {text!r}")


def _load_config_file(path: str) -> dict:
    try:
        with open(path) as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    unknown = set(data) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return data


def _build_run_config(args) -> ScenarioConfig:
    file_cfg = _load_config_file(args.config) if args.config else {}
    balancers = ("sbdlb", "throttled") if args.balancer == "both" \
        else (args.balancer,)
    rates = CostRates(**file_cfg["cost_rates"]) if "cost_rates" in file_cfg \
        else CostRates()

    def pick(flag_value, key, default):
        if flag_value is not None:
            return flag_value
        return file_cfg.get(key, default)

    dcs = args.dcs or file_cfg.get("dcs")
    vms = args.vms or file_cfg.get("vms")
    try:
        return ScenarioConfig(
            scenario=args.scenario,
            out_dir=Path(args.out),
            balancers=balancers,
            seed=int(pick(args.seed, "seed", 42)),
            scale=float(pick(args.scale, "scale", 0.02)),
            dcs=tuple(dcs) if dcs else None,
            vms=tuple(vms) if vms else None,
            total_tasks=pick(args.tasks, "tasks", None),
            threshold=int(pick(args.threshold, "task_threshold", 3)),
            floor_fraction=float(pick(None, "floor_fraction", 0.05)),
            queue_mode=pick(None, "queue_mode", "scan"),
            execution_model=pick(None, "execution_model", "shared"),
            inter_batch_interval=file_cfg.get("inter_batch_interval"),
            reps=int(pick(args.reps, "reps", 1)),
            cost_rates=rates,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simlb",
        description="Score-based vs throttled cloud load-balancing simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario sweep")
    run.add_argument("--scenario", required=True,
                     choices=["s1", "s2", "s3", "s4", "threshold"])
    run.add_argument("--balancer", default="both",
                     choices=["sbdlb", "throttled", "both"])
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--scale", type=float, default=None)
    run.add_argument("--out", required=True)
    run.add_argument("--dcs", type=_parse_int_list, default=None,
                     help="comma-separated DC counts")
    run.add_argument("--vms", type=_parse_int_list, default=None,
                     help="comma-separated VMs-per-DC values")
    run.add_argument("--tasks", type=int, default=None)
    run.add_argument("--threshold", type=int, default=None)
    run.add_argument("--reps", type=int, default=None)
    run.add_argument("--config", default=None, help="JSON config file")

    cmp_p = sub.add_parser("compare", help="compare two output directories")
    cmp_p.add_argument("--a", required=True)
    cmp_p.add_argument("--b", required=True)
    cmp_p.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            cfg = _build_run_config(args)
            results = run_scenario(cfg)
            print(f"{len(results)} runs written to {cfg.out_dir}")
        else:
            rows = compare_directories(args.a, args.b, args.out)
            print(f"{len(rows)} comparison rows written to {args.out}")
    except (ConfigError, MismatchedSweeps) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SimulationError as exc:
        print(f"simulation invariant violated: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
