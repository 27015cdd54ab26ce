"""Command-line front end: run, compare, bound, validate.

Exit codes: 0 success, 2 configuration error, 3 simulation fault.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .analysis import compare, finite_time_bound, format_comparison, format_metrics
from .config import load_config
from .errors import ConfigError, SimulationFault
from .runner import run_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FAULT = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario and write its CSV log")
    p_run.add_argument("--config", required=True, help="scenario config (JSON)")
    p_run.add_argument("--controller", choices=("flc", "clelc"), help="override the configured controller")
    p_run.add_argument("--out", help="CSV output path (default: from config, else derived)")

    p_cmp = sub.add_parser("compare", help="run both controllers and emit CSVs plus a JSON comparison")
    p_cmp.add_argument("--config", required=True)
    p_cmp.add_argument("--out-dir", required=True)

    p_bound = sub.add_parser("bound", help="print the finite reaching-time bound")
    p_bound.add_argument("--s0", type=float, required=True, help="initial sliding value")
    p_bound.add_argument("--alpha", type=float, required=True, help="learning rate")
    p_bound.add_argument("--b", type=float, required=True, help="bound on the disturbance rate")

    p_val = sub.add_parser("validate", help="check a config file and exit")
    p_val.add_argument("--config", required=True)
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    if args.controller:
        config = dataclasses.replace(config, controller=args.controller).validate()
    log, metrics = run_scenario(config)
    out = args.out or config.output or f"{config.scenario}_{config.controller}.csv"
    log.to_csv(out)
    print(format_metrics(metrics, title=f"{config.scenario} / {config.controller}"))
    print(f"log written to {out}")
    if log.events:
        print(f"{len(log.events)} flagged samples (first: {log.events[0]})")
    return EXIT_OK


def _cmd_compare(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = {}
    for controller in ("flc", "clelc"):
        run_config = dataclasses.replace(config, controller=controller).validate()
        log, metrics = run_scenario(run_config)
        log.to_csv(out_dir / f"{config.scenario}_{controller}.csv")
        results[controller] = metrics
    report = compare(results["flc"], results["clelc"])
    payload = {
        "flc": results["flc"].to_dict(),
        "clelc": results["clelc"].to_dict(),
        "comparison": report,
    }
    (out_dir / "comparison.json").write_text(json.dumps(payload, indent=2) + "\n")
    print(format_comparison(report))
    print(f"outputs written to {out_dir}")
    return EXIT_OK


def _cmd_bound(args: argparse.Namespace) -> int:
    print(repr(finite_time_bound(args.s0, args.alpha, args.b)))
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    load_config(args.config)
    print(f"{args.config}: ok")
    return EXIT_OK


_COMMANDS = {
    "run": _cmd_run,
    "compare": _cmd_compare,
    "bound": _cmd_bound,
    "validate": _cmd_validate,
}


def main(argv: "list[str] | None" = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationFault as err:
        print(f"simulation fault: {err}", file=sys.stderr)
        return EXIT_FAULT


if __name__ == "__main__":
    sys.exit(main())
