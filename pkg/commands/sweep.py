import argparse
import logging

from arcsim import csvio
from arcsim.config import RuntimeSettings
from arcsim.models import RESULT_COLUMNS
from arcsim.pipeline import sweep_point, sweep_values
from commands import common_parser, load_config, map_points, output_path

log = logging.getLogger(__name__)


def run(args: argparse.Namespace, runtime: RuntimeSettings) -> int:
    cfg = load_config(args)
    key, values = sweep_values(cfg)
    workers = runtime.resolve_workers(args.workers)
    log.info(f"Sweeping {key} over {len(values)} points with {workers} worker(s)")
    rows = map_points(sweep_point, [(cfg, key, value) for value in values], workers)
    csvio.write_csv(
        output_path(args, cfg),
        cfg.header_lines(),
        [key] + list(RESULT_COLUMNS),
        [row.as_list() for row in rows],
    )
    return 0


def setup(subparsers) -> None:
    parser = subparsers.add_parser(
        "sweep", parents=[common_parser()], help="evaluate one row per point of sweep.parameter"
    )
    parser.set_defaults(handler=run)
