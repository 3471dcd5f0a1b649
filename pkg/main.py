import argparse
import datetime
import importlib
import logging
import os
import sys
import time
from typing import List, Optional

import humanize

from arcsim import __version__
from arcsim.config import RuntimeSettings
from arcsim.errors import ArcSimError

log = logging.getLogger("arcsim")

COMMANDS_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "commands")
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def setup_logging(level: str = "INFO", log_file: Optional[str] = None) -> None:
    """Log to stderr, and append to log_file when one is configured. stdout stays data-only."""
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
    formatter = logging.Formatter(LOG_FORMAT)
    stream = logging.StreamHandler(sys.stderr)
    stream.setFormatter(formatter)
    root.addHandler(stream)
    if log_file:
        file_handler = logging.FileHandler(log_file, mode="a")
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)
    root.setLevel(getattr(logging, level, logging.INFO))


def load_commands(subparsers) -> List[str]:
    """Register every command module found in commands/."""
    loaded = []
    for filename in sorted(os.listdir(COMMANDS_DIR)):
        if filename.endswith(".py"):
            command_name = filename[:-3]
            if filename.startswith("_"):
                continue
            module = importlib.import_module(f"commands.{command_name}")
            module.setup(subparsers)
            loaded.append(command_name)
            log.debug(f"Loaded command module: {command_name}")
    return loaded


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arcsim",
        description="First-order electron wavepacket / quantum light interaction simulator",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    load_commands(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    try:
        runtime = RuntimeSettings()
    except ArcSimError as e:
        setup_logging()
        log.error(str(e))
        return e.exit_code
    setup_logging(runtime.log_level, runtime.log_file)

    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        code = args.handler(args, runtime)
    except ArcSimError as e:
        log.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except Exception:
        log.exception(f"Unexpected error in {args.command}")
        return 1
    elapsed = datetime.timedelta(seconds=time.perf_counter() - start)
    log.info(f"{args.command} finished in {humanize.precisedelta(elapsed, minimum_unit='milliseconds')}")
    return code


if __name__ == "__main__":
    sys.exit(main())
