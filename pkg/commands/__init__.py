"""
Command modules.
Each module in this package exposes ``setup(subparsers)``, which registers
one or more subcommands and binds their handler with ``set_defaults``.
A handler takes (args, runtime) and returns the process exit code.
"""

import argparse
import logging
from multiprocessing import Pool
from typing import Callable, Iterable, List, Optional, TypeVar

from arcsim.config import RunConfig

log = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def common_parser() -> argparse.ArgumentParser:
    """Flags shared by every subcommand."""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config", help="run configuration file (key = value lines)")
    parser.add_argument("--output", help="output CSV path (default: output.path or stdout)")
    parser.add_argument("--workers", type=int, help="worker processes for sweeps")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    if args.config:
        return RunConfig.from_file(args.config)
    log.info("No --config given, running on defaults")
    return RunConfig.from_mapping({})


def output_path(args: argparse.Namespace, cfg: RunConfig) -> Optional[str]:
    """--output beats output.path; empty means stdout."""
    return args.output or cfg.output.path or None


def map_points(func: Callable[[T], R], tasks: Iterable[T], workers: int) -> List[R]:
    """Evaluate tasks in order, on a process pool when more than one worker is allowed."""
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [func(task) for task in tasks]
    with Pool(processes=min(workers, len(tasks))) as pool:
        return pool.map(func, tasks)
