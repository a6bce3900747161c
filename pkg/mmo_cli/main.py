"""Experiment runner entry point.

Run with: python -m mmo_cli <subcommand> [flags] [--debug]

Subcommands:
  - bench-single   standalone optimizers at several agent counts
  - bench-mmo      the team over a frequency x scheme grid
  - ablation       the team with each optimizer removed in turn
  - cross-dim      team versus one optimizer across dimensions
  - svm            SGD and MMO trainers on a UCI dataset
  - optimize       one team run on a benchmark or a user evaluator (JSON on stdout)

Exit codes: 0 success, 2 usage or configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import traceback
from typing import Any, Optional

from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from mmo.errors import ConfigError, DatasetError, DimensionError, EvaluatorError

from .config import settings
from .experiments import (
    COMMANDS, ExperimentConfig, ExperimentOutput, merge_setting, read_config_file,
    resolve_config,
)
from .output import RunDirectory

console = Console(stderr=True)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RUNTIME = 3

# Flags that are not experiment parameters.
_CONTROL_FLAGS = ("command", "config", "name", "results_dir", "debug", "set")

_USAGE_ERRORS = (ConfigError, DimensionError, DatasetError)


def _setup_logging(debug: bool) -> None:
    level = logging.DEBUG if debug else logging.WARNING
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(name)-14s %(levelname)-7s %(message)s",
        datefmt="%H:%M:%S",
        stream=sys.stderr,
    )


# ── Parser ────────────────────────────────────────────────────

def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="key = value file; flags override its values")
    common.add_argument("--name", help="results sub-directory (default: UTC timestamp)")
    common.add_argument("--results-dir", help="results root (default: MMO_RESULTS_DIR)")
    common.add_argument("--debug", action="store_true", help="Enable debug logging")
    common.add_argument("--seed", help="master seed (trial i uses seed + i)")
    common.add_argument("--trials", help="number of trials R")
    common.add_argument("--set", action="append", metavar="ID.PARAM=VALUE",
                        help="optimizer hyperparameter override, e.g. bat.alpha=0.95")
    return common


def _objective_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    p.add_argument("--benchmark", help="rosenbrock, griewank or zakharov")
    p.add_argument("--dim", help="problem dimension D")
    p.add_argument("--lower", help="lower bound in every coordinate")
    p.add_argument("--upper", help="upper bound in every coordinate")
    return p


def _team_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    p.add_argument("--roster", help="comma-separated optimizer ids")
    p.add_argument("--agents", help="agents per optimizer")
    p.add_argument("--generations", help="generations G")
    p.add_argument("--scheme", help="averaging, rank, exponential, best or meta")
    p.add_argument("--frequency", help="communication frequency γ")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mmo", description="Multi-metaheuristic optimizer experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    common, objective, team = _common_parser(), _objective_parser(), _team_parser()

    p = sub.add_parser("bench-single", parents=[common, objective],
                       argument_default=argparse.SUPPRESS, help="standalone optimizers")
    p.add_argument("--optimizers", help="comma-separated optimizer ids")
    p.add_argument("--agents", help="comma-separated agent counts")
    p.add_argument("--generations", help="generations G")

    p = sub.add_parser("bench-mmo", parents=[common, objective, team],
                       argument_default=argparse.SUPPRESS, help="frequency x scheme sweep")
    p.add_argument("--schemes", help="comma-separated schemes")
    p.add_argument("--frequencies", help="comma-separated frequencies")

    sub.add_parser("ablation", parents=[common, objective, team],
                   argument_default=argparse.SUPPRESS, help="leave-one-out rosters")

    p = sub.add_parser("cross-dim", parents=[common, objective, team],
                       argument_default=argparse.SUPPRESS, help="team vs one optimizer by dimension")
    p.add_argument("--dims", help="comma-separated dimensions")
    p.add_argument("--dim-generations", help="comma-separated generations, one per dimension")
    p.add_argument("--baseline", help="standalone optimizer id")

    p = sub.add_parser("svm", parents=[common, team],
                       argument_default=argparse.SUPPRESS, help="SGD vs MMO linear SVM")
    p.add_argument("--dataset", help="bcw or image_segmentation")
    p.add_argument("--data-path", help="UCI data file")
    p.add_argument("--regularizations", help="comma-separated λ values")
    p.add_argument("--learning-rates", help="comma-separated SGD α values")
    p.add_argument("--iterations", help="SGD iterations and MMO generations")
    p.add_argument("--schemes", help="comma-separated schemes")
    p.add_argument("--frequencies", help="comma-separated frequencies")

    p = sub.add_parser("optimize", parents=[common, objective, team],
                       argument_default=argparse.SUPPRESS, help="one team run, JSON result")
    p.add_argument("--evaluator", help="path.py[:function], default function 'objective'")
    return parser


def _flag_values(args: argparse.Namespace) -> dict[str, Any]:
    values: dict[str, Any] = {}
    for key, value in vars(args).items():
        if key not in _CONTROL_FLAGS:
            values[key] = value
    for item in getattr(args, "set", None) or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects ID.PARAM=VALUE, got '{item}'")
        merge_setting(values, f"override.{key.strip()}", value)
    return values


def _validation_message(e: ValidationError) -> str:
    return "; ".join(f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}"
                     for err in e.errors())


# ── Display ───────────────────────────────────────────────────

def _print_table(title: str, output: ExperimentOutput) -> None:
    table = Table(title=title, show_lines=False)
    frame = output.results
    for column in frame.columns:
        table.add_column(str(column), justify="right" if frame[column].dtype.kind in "if" else "left")
    for row in frame.itertuples(index=False):
        table.add_row(*(f"{v:.6g}" if isinstance(v, float) else str(v) for v in row))
    console.print(table)


# ── Main ──────────────────────────────────────────────────────

def _run(args: argparse.Namespace) -> int:
    debug = getattr(args, "debug", False)
    try:
        file_values = read_config_file(args.config) if getattr(args, "config", None) else {}
        cfg: ExperimentConfig = resolve_config(args.command, file_values, _flag_values(args))
    except ValidationError as e:
        console.print(f"[red]error:[/] {_validation_message(e)}")
        return EXIT_USAGE
    except _USAGE_ERRORS as e:
        console.print(f"[red]error:[/] {e}")
        return EXIT_USAGE

    command = COMMANDS[args.command]
    try:
        with console.status(f"[dim]{args.command}...[/]", spinner="dots") as status:
            output = command(cfg, lambda text: status.update(f"[dim]{args.command}: {text}[/]"))
    except _USAGE_ERRORS as e:
        console.print(f"[red]error:[/] {e}")
        return EXIT_USAGE
    except Exception as e:
        kind = "evaluator error" if isinstance(e, EvaluatorError) else "error"
        console.print(f"[red]{kind}:[/] {e}")
        if debug:
            console.print(traceback.format_exc())
        return EXIT_RUNTIME

    root = getattr(args, "results_dir", None) or settings.mmo_results_dir
    path = RunDirectory(root, args.command, getattr(args, "name", None)).write(cfg, output)
    _print_table(f"{args.command} → {path}", output)
    if output.summary:
        print(json.dumps(output.summary))
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    _setup_logging(getattr(args, "debug", False))
    return _run(args)


if __name__ == "__main__":
    sys.exit(main())
