import argparse
import logging
import math
from typing import List, Tuple

from scipy import constants

from arcsim import csvio, oracles, params
from arcsim.config import RunConfig, RuntimeSettings
from arcsim.errors import ConfigError, DomainError
from arcsim.pipeline import axis
from commands import common_parser, load_config, output_path

log = logging.getLogger(__name__)

COLUMNS = ("omega", "angle", "theta", "density", "pipeline")


def spectrum_table(cfg: RunConfig) -> Tuple[List[str], List[str], List[List[float]]]:
    """Spontaneous Smith-Purcell density along the emission angle or the wavelength."""
    sp = cfg.smith_purcell
    for name in ("wavelength", "grating_period", "length", "area"):
        if not getattr(sp, name) > 0:
            raise ConfigError(f"smith_purcell.{name} must be > 0")
    velocity = sp.beta * constants.c
    params.lorentz_factor(sp.beta)

    if sp.axis == "angle":
        points = [
            (params.angular_frequency(sp.wavelength), angle)
            for angle in axis(sp.angle_from, sp.angle_to, sp.steps, "linear", "smith_purcell.angle")
        ]
    else:
        points = [
            (params.angular_frequency(wavelength), sp.angle)
            for wavelength in axis(
                sp.wavelength_from, sp.wavelength_to, sp.steps, "linear", "smith_purcell.wavelength"
            )
        ]

    rows = []
    annotations = []
    for omega, angle in points:
        qz = params.smith_purcell_qz(omega, angle, sp.grating_period, sp.order)
        theta = params.detuning(omega, velocity, qz, sp.length)
        volume = sp.volume
        if volume is None:
            volume = oracles.matching_volume(omega, sp.length, sp.beta, sp.eta, sp.area)
        rows.append([
            omega,
            angle,
            theta,
            oracles.smith_purcell_density(omega, sp.length, sp.eta, theta),
            oracles.smith_purcell_pipeline(omega, sp.length, sp.beta, sp.eta, theta, sp.area, volume),
        ])

    try:
        synchronous = params.synchronous_angle(
            params.angular_frequency(sp.wavelength), sp.beta, sp.grating_period, sp.order
        )
        annotations.append(f"synchronous_angle = {csvio.format_float(synchronous)}")
    except DomainError as e:
        log.info(f"No synchronous angle at the configured wavelength: {e}")
        annotations.append(f"synchronous_angle = {csvio.format_float(math.nan)}")
    return annotations, list(COLUMNS), rows


def run(args: argparse.Namespace, runtime: RuntimeSettings) -> int:
    cfg = load_config(args)
    annotations, columns, rows = spectrum_table(cfg)
    csvio.write_csv(output_path(args, cfg), cfg.header_lines(), columns, rows, annotations)
    return 0


def setup(subparsers) -> None:
    parser = subparsers.add_parser(
        "smith-purcell", parents=[common_parser()],
        help="spontaneous Smith-Purcell emission per unit frequency and solid angle",
    )
    parser.set_defaults(handler=run)
