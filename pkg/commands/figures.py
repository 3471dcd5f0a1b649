"""
Figure data: phase-dependent emission against the extinction parameter, and
the extinction map over initial wavepacket size and drift length.
"""

import argparse
import logging
import math
from typing import List, Tuple

from arcsim import csvio, oracles, params
from arcsim.config import RunConfig, RuntimeSettings
from arcsim.errors import ConfigError
from arcsim.models import PhotonKind
from arcsim.pipeline import axis, build_params, sweep_point
from commands import common_parser, load_config, map_points, output_path

log = logging.getLogger(__name__)

ARC_SCAN_COLUMNS = ("gamma", "extinction", "dnu1_oracle", "normalized", "dnu_vac", "snr")
EXTINCTION_MAP_COLUMNS = (
    "sigma_z0", "drift_length", "gamma0", "chirp", "gamma", "extinction", "point_particle",
)


def crossing_gamma(point_signal: float, floor: float) -> float:
    """Γ at which |Δν⁽¹⁾| = |Δν⁽¹⁾(0)|·e^{−Γ²/2} falls to the spontaneous floor; nan if never above it."""
    if floor <= 0 or abs(point_signal) <= floor:
        return math.nan
    return math.sqrt(2.0 * math.log(abs(point_signal) / floor))


def arc_scan_table(cfg: RunConfig, workers: int = 1) -> Tuple[List[str], List[str], List[List[float]]]:
    """(annotations, columns, rows) of the emission-versus-Γ table."""
    if PhotonKind(cfg.photon.kind) is not PhotonKind.COHERENT:
        raise ConfigError("arc_scan needs photon.kind = coherent")
    knobs = build_params(cfg)
    gammas = axis(
        cfg.arc_scan.gamma_from, cfg.arc_scan.gamma_to, cfg.arc_scan.steps, cfg.arc_scan.scale, "arc_scan"
    )
    point = oracles.coherent_arc(
        knobs.upsilon, knobs.nu0, 0.0, knobs.theta, knobs.epsilon, knobs.phi0
    ).dnu1
    floor = oracles.vacuum_spontaneous(knobs.upsilon, knobs.theta)

    rows = []
    for gamma in gammas:
        signal = oracles.coherent_arc(
            knobs.upsilon, knobs.nu0, gamma, knobs.theta, knobs.epsilon, knobs.phi0
        ).dnu1
        rows.append([
            gamma,
            params.extinction(gamma),
            signal,
            signal / point if point != 0 else math.nan,
            floor,
            signal / floor if floor > 0 else math.nan,
        ])

    columns = list(ARC_SCAN_COLUMNS)
    if cfg.arc_scan.engine:
        tasks = [(cfg, "scenario.gamma", float(gamma)) for gamma in gammas]
        engine_rows = map_points(sweep_point, tasks, workers)
        columns.append("dnu1_num")
        for row, engine in zip(rows, engine_rows):
            row.append(engine.values["dnu1_num"])

    annotations = [f"crossing_gamma = {csvio.format_float(crossing_gamma(point, floor))}"]
    if knobs.upsilon > 0:
        annotations.append(
            f"snr_bound = {csvio.format_float(params.snr_max(knobs.nu0, knobs.upsilon))}"
        )
    return annotations, columns, rows


def extinction_map_table(cfg: RunConfig) -> Tuple[List[str], List[List[float]]]:
    """Extinction over (σ_z0, L_D) at the configured wavelength and velocity."""
    section = cfg.extinction_map
    wavelength, beta = section.wavelength, section.beta
    params.lorentz_factor(beta)
    sigmas = axis(section.sigma_from, section.sigma_to, section.sigma_steps, "linear", "extinction_map.sigma")
    drifts = axis(section.drift_from, section.drift_to, section.drift_steps, "linear", "extinction_map.drift")
    rows = []
    for sigma in sigmas:
        if sigma <= 0:
            raise ConfigError(f"extinction_map: sigma_z0 must be > 0, got {sigma}")
        gamma0 = 2.0 * math.pi * sigma / (beta * wavelength)
        for drift in drifts:
            chirp = params.chirp_from_drift(drift, sigma, beta)
            gamma = params.gamma(gamma0, chirp)
            point_like = 1.0 if params.is_point_particle(gamma) else 0.0
            rows.append([sigma, drift, gamma0, chirp, gamma, params.extinction(gamma), point_like])
    return list(EXTINCTION_MAP_COLUMNS), rows


def run_arc_scan(args: argparse.Namespace, runtime: RuntimeSettings) -> int:
    cfg = load_config(args)
    annotations, columns, rows = arc_scan_table(cfg, runtime.resolve_workers(args.workers))
    csvio.write_csv(output_path(args, cfg), cfg.header_lines(), columns, rows, annotations)
    return 0


def run_extinction_map(args: argparse.Namespace, runtime: RuntimeSettings) -> int:
    cfg = load_config(args)
    columns, rows = extinction_map_table(cfg)
    csvio.write_csv(output_path(args, cfg), cfg.header_lines(), columns, rows)
    return 0


def setup(subparsers) -> None:
    arc_scan = subparsers.add_parser(
        "arc-scan", aliases=["fig3a"], parents=[common_parser()],
        help="phase-dependent emission against Γ with the spontaneous floor",
    )
    arc_scan.set_defaults(handler=run_arc_scan)
    extinction_map = subparsers.add_parser(
        "extinction-map", aliases=["fig3b"], parents=[common_parser()],
        help="extinction e^{-Γ²/2} over initial size and drift length",
    )
    extinction_map.set_defaults(handler=run_extinction_map)
