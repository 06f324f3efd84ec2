#!/usr/bin/env python3
"""
Command-line front door for the RF-FSO secrecy toolkit.

  run      sweep one parameter of a scenario file and write CSV
  preset   sweep a built-in figure/table preset
  presets  list the preset catalog
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Optional

# Run from a checkout without installing
ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from rffso.config import get_log_level, get_output_dir  # noqa: E402
from rffso.errors import ConfigError  # noqa: E402
from rffso import runner  # noqa: E402

logger = logging.getLogger("secrecy_cli")


def _set_if(value: Optional[object], env_var: str) -> None:
    if value is not None:
        os.environ[env_var] = str(value)


def _setup(args: argparse.Namespace) -> None:
    _set_if(args.workers, "RFFSO_WORKERS")
    _set_if(args.log_level, "RFFSO_LOG_LEVEL")
    logging.basicConfig(
        level=get_log_level(),
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    )


def cmd_run(args: argparse.Namespace) -> int:
    """Sweep a scenario file."""
    try:
        sweep = runner.SweepSpec.parse(args.sweep, args.methods)
    except ConfigError as exc:
        logger.error("%s", exc)
        return runner.EXIT_CONFIG
    return runner.run_scenario(
        args.config, sweep, args.out, seed=args.seed, trials=args.trials, workers=args.workers
    )


def cmd_preset(args: argparse.Namespace) -> int:
    """Sweep a built-in preset."""
    out = args.out or get_output_dir() / f"{args.name}.csv"
    methods = None
    if args.methods is not None:
        methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    return runner.run_preset(
        args.name, out, methods=methods, seed=args.seed, trials=args.trials, workers=args.workers
    )


def cmd_presets(args: argparse.Namespace) -> int:
    """Print the preset catalog."""
    for preset in runner.list_presets():
        if args.verbose:
            print(preset.describe())
        else:
            print(f"{preset.name:32s} {preset.title}")
    return runner.EXIT_OK


def _add_shared(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, help="Monte Carlo seed (default: env RFFSO_SEED or scenario [mc])")
    p.add_argument("--trials", type=int, help="Monte Carlo trials per point (env RFFSO_TRIALS)")
    p.add_argument("--workers", type=int, help="Parallel grid points (env RFFSO_WORKERS)")
    p.add_argument("--log-level", dest="log_level", help="Logging level (env RFFSO_LOG_LEVEL)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Secrecy metrics of a mixed RF-FSO DF relay (SOP, SPSC, IP)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="Sweep one parameter of a scenario file")
    run_p.add_argument("--config", required=True, help="Scenario INI file")
    run_p.add_argument("--sweep", required=True, help="var=start:stop:steps, e.g. u_d_db=0:30:16")
    run_p.add_argument("--methods", default="closed,mc", help="Comma list of closed,asymptotic,quadrature,mc")
    run_p.add_argument("--out", required=True, help="Output CSV path")
    _add_shared(run_p)
    run_p.set_defaults(func=cmd_run)

    preset_p = sub.add_parser("preset", help="Sweep a built-in preset")
    preset_p.add_argument("name", help="Preset name, see `presets`")
    preset_p.add_argument("--out", help="Output CSV path (default: <output dir>/<name>.csv)")
    preset_p.add_argument("--methods", help="Override the preset's methods")
    _add_shared(preset_p)
    preset_p.set_defaults(func=cmd_preset)

    list_p = sub.add_parser("presets", help="List built-in presets")
    list_p.add_argument("--verbose", action="store_true", help="Show every frozen parameter")
    list_p.add_argument("--log-level", dest="log_level", help=argparse.SUPPRESS)
    list_p.set_defaults(func=cmd_presets, seed=None, trials=None, workers=None)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _setup(args)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
