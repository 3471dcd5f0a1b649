import argparse
import logging
from typing import Dict, List

from arcsim import csvio, params, scattering
from arcsim.config import RunConfig, RuntimeSettings
from arcsim.models import Dispersion, InteractionReport
from arcsim.pipeline import RunSettings, build_params, photon_summary, simulate_config
from commands import common_parser, load_config, output_path

log = logging.getLogger(__name__)

SPECTRUM_COLUMNS = ("energy", "probability")


def summary_lines(row) -> list:
    values = row.values
    point_like = "yes" if params.is_point_particle(values["gamma"]) else "no"
    return [
        f"gamma          {values['gamma']:.10g} (extinction {values['extinction']:.10g}, "
        f"point particle: {point_like})",
        f"dnu1 numeric   {values['dnu1_num']:.10g}   closed form {values['oracle_dnu1']:.10g}",
        f"dnu2 numeric   {values['dnu2_num']:.10g}   closed form {values['oracle_dnu2']:.10g}",
        f"dE1, dE2       {values['dE1_num']:.10g}, {values['dE2_num']:.10g}",
        f"ARC residuals  r1 = {values['arc_r1']:.6g}, r2 = {values['arc_r2']:.6g}",
        f"cross terms    nu {values['cross_nu']:.6g}, E {values['cross_E']:.6g}",
        f"direct         dnu {values['dnu_direct']:.10g}, dE {values['dE_direct']:.10g}",
        f"norm deficit   {values['norm_deficit']:.6g}",
    ]


def photon_lines(summary: Dict[str, float]) -> List[str]:
    lines = [f"photons        <n> = {summary['mean_photons']:.10g}, Mandel Q = {summary['mandel_q']:.6g}"]
    if "quadrature_size" in summary:
        line = (
            f"squeezing      quadrature size {summary['quadrature_size']:.6g}, "
            f"hbar*omega/kT = {summary['hbar_omega_over_kT']:.6g}"
        )
        if "temperature_K" in summary:
            line += f" (T = {summary['temperature_K']:.6g} K)"
        lines.append(line)
    return lines


def spectrum_table(cfg: RunConfig, report: InteractionReport) -> List[List[float]]:
    """Electron energy spectrum rows (energy in ħω, probability per grid bin)."""
    energies, probabilities = scattering.sideband_spectrum(
        report.spectrum, Dispersion(cfg.run.dispersion), build_params(cfg)
    )
    return [[float(e), float(p)] for e, p in zip(energies, probabilities)]


def run(args: argparse.Namespace, runtime: RuntimeSettings) -> int:
    cfg = load_config(args)
    row, report, _ = simulate_config(cfg)
    path = output_path(args, cfg)
    csvio.write_csv(path, cfg.header_lines(), row.header(), [row.as_list()])
    if report.spectrum is not None:
        spectrum = report.spectrum
        log.info(
            f"Sidebands: down {spectrum.downshifted:.6g}, central {spectrum.central:.6g}, "
            f"up {spectrum.upshifted:.6g}"
        )
        if cfg.output.spectrum:
            csvio.write_csv(
                cfg.output.spectrum, cfg.header_lines(), SPECTRUM_COLUMNS, spectrum_table(cfg, report)
            )
    lines = summary_lines(row) + photon_lines(
        photon_summary(build_params(cfg), RunSettings.from_config(cfg), cfg.scenario.wavelength)
    )
    if path:
        print("\n".join(lines))
    else:
        for line in lines:
            log.info(line)
    return 0


def setup(subparsers) -> None:
    parser = subparsers.add_parser(
        "simulate", parents=[common_parser()], help="run one interaction and write one CSV row"
    )
    parser.set_defaults(handler=run)
