"""
Built-in acceptance suite.
Runs every analytic-oracle and property check, prints one table row per
check and fails (exit 1) when any gated check is out of tolerance.
Investigative rows are printed with status REPORTED and never fail.
"""

import argparse
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np

from arcsim import csvio, oracles, params, scattering, states
from arcsim.config import RunConfig, RuntimeSettings
from arcsim.errors import CheckFailure
from arcsim.models import DimensionlessParams, Dispersion, InteractionReport, Ordering, PhotonKind
from arcsim.numerics import sinc
from arcsim.pipeline import RunSettings, build_joint, simulate_config
from commands import common_parser
from commands.figures import arc_scan_table, extinction_map_table

log = logging.getLogger(__name__)

PASS, FAIL, REPORTED = "PASS", "FAIL", "REPORTED"

# λ = 1 µm, L = 1 mm, η = 0.1, on synchronism.
SMITH_PURCELL_GOLDEN = 6.0440962542e-33
FEL_GAIN_DETUNING = 2.606


@dataclass
class CheckResult:
    name: str
    expected: str
    measured: str
    tolerance: str
    status: str

    @property
    def failed(self) -> bool:
        return self.status == FAIL


def _number(value: float) -> str:
    return csvio.format_float(value) if not isinstance(value, str) else value


def gated(name: str, expected, measured: float, error: float, tolerance: float) -> CheckResult:
    """A check that passes when error ≤ tolerance."""
    status = PASS if error <= tolerance else FAIL
    if math.isnan(error):
        status = FAIL
    return CheckResult(name, _number(expected), _number(measured), f"{tolerance:.1e}", status)


def reported(name: str, expected: str, measured: str) -> CheckResult:
    return CheckResult(name, expected, measured, "-", REPORTED)


def relative_error(measured: float, expected: float, floor: float = 0.0) -> float:
    """|m − e|/|e|, or the absolute error when |e| is below floor."""
    difference = abs(measured - expected)
    if abs(expected) <= floor:
        return difference
    return difference / abs(expected)


class Suite:
    """Acceptance checks; tolerance_scale multiplies every tolerance."""

    def __init__(self, tolerance_scale: float = 1.0, grid: Optional[RunSettings] = None):
        self.scale = tolerance_scale
        self.base = grid or RunSettings()

    def tol(self, value: float) -> float:
        return value * self.scale

    def settings(self, kind: PhotonKind, **changes) -> RunSettings:
        values = dict(
            kind=kind,
            ordering=self.base.ordering,
            n_max=None,
            m_align=self.base.m_align,
            sigma_coverage=self.base.sigma_coverage,
            dispersion=Dispersion.LINEAR,
        )
        values.update(changes)
        return RunSettings(**values)

    def channels(self, knobs: DimensionlessParams, settings: RunSettings) -> Tuple[InteractionReport, object]:
        joint = build_joint(knobs, settings)
        scattered = scattering.scatter_first_order(joint, knobs)
        report = scattering.observables_channels(joint, scattered, settings.dispersion, knobs)
        return report, scattered

    def fock_nullity(self) -> List[CheckResult]:
        worst = 0.0
        for nu0 in (0, 1, 5, 50):
            kind = PhotonKind.VACUUM if nu0 == 0 else PhotonKind.FOCK
            for theta in (0.0, 1.0, 2.6):
                for gamma in (0.2, 1.0, 3.0):
                    knobs = DimensionlessParams(upsilon=0.01, theta=theta, gamma0=gamma, nu0=nu0)
                    report, _ = self.channels(knobs, self.settings(kind))
                    worst = max(worst, abs(report.dnu1), abs(report.de1))
        return [gated("fock_nullity max|dnu1|,|dE1|", 0.0, worst, worst, self.tol(1e-12))]

    def coherent_first_order(self) -> List[CheckResult]:
        worst = 0.0
        for upsilon in (0.005, 0.02):
            for nu0 in (4.0, 100.0):
                for gamma in (0.1, 0.5, 1.0, 2.0, 3.0):
                    for theta in (0.0, 1.0, 2.6):
                        for phi0 in (0.0, math.pi / 3.0, math.pi):
                            knobs = DimensionlessParams(
                                upsilon=upsilon, theta=theta, phi0=phi0, gamma0=gamma, nu0=nu0
                            )
                            report, _ = self.channels(knobs, self.settings(PhotonKind.COHERENT))
                            expected = oracles.coherent_arc(upsilon, nu0, gamma, theta, 0.0, phi0).dnu1
                            worst = max(worst, relative_error(report.dnu1, expected, 1e-12))
        return [gated("coherent_dnu1_vs_closed_form max rel", 0.0, worst, worst, self.tol(1e-6))]

    def extinction_law(self) -> List[CheckResult]:
        gammas = np.geomspace(0.1, 4.0, 12)
        upsilon, nu0 = 0.01, 4.0
        point = oracles.classical_point_energy(params.classical_amplitude(upsilon, nu0), 0.0, 0.0)
        logs = []
        for gamma in gammas:
            knobs = DimensionlessParams(upsilon=upsilon, gamma0=gamma, nu0=nu0)
            report, _ = self.channels(knobs, self.settings(PhotonKind.COHERENT))
            logs.append(math.log(report.dnu1 / -point))
        slope = float(np.polyfit(gammas**2, np.array(logs), 1)[0])
        return [gated("extinction_law slope", -0.5, slope, abs(slope + 0.5) / 0.5, self.tol(5e-3))]

    def gamma_formula(self) -> List[CheckResult]:
        worst = 0.0
        for gamma0 in (0.5, 1.0):
            for chirp in (0.0, 1.0, -1.0, 5.0, -5.0):
                rho = 0.5 / gamma0
                grid = states.momentum_grid(rho, chirp, self.base.m_align, self.base.sigma_coverage)
                electron = states.gaussian_wavepacket(rho, chirp, grid)
                expected = params.extinction(params.gamma(gamma0, chirp))
                worst = max(worst, abs(abs(states.shifted_overlap(electron)) - expected))
        return [gated("chirped_overlap vs exp(-G^2/2) max abs", 0.0, worst, worst, self.tol(1e-8))]

    def second_order(self) -> List[CheckResult]:
        worst = 0.0
        cases = [(PhotonKind.FOCK, nu0) for nu0 in (1, 5, 50)] + [
            (PhotonKind.COHERENT, nu0) for nu0 in (4.0, 100.0)
        ]
        for kind, nu0 in cases:
            for epsilon in (0.0, 0.1):
                for theta in (0.0, 1.0, 2.6):
                    knobs = DimensionlessParams(
                        upsilon=0.01, theta=theta, epsilon=epsilon, phi0=0.4, nu0=nu0
                    )
                    report, _ = self.channels(knobs, self.settings(kind))
                    expected = oracles.fock_arc(0.01, nu0, theta, epsilon).dnu2
                    worst = max(worst, relative_error(report.dnu2, expected, 1e-14))
        return [gated("second_order_dnu2 max rel", 0.0, worst, worst, self.tol(1e-8))]

    def vacuum_emission(self) -> List[CheckResult]:
        worst, absorption, residue = 0.0, 0.0, 0.0
        for theta in (0.0, 1.0, 2.6):
            for epsilon in (0.0, 0.1):
                knobs = DimensionlessParams(upsilon=0.02, theta=theta, epsilon=epsilon)
                joint = build_joint(knobs, self.settings(PhotonKind.VACUUM))
                report = scattering.interaction_report(joint, knobs, spectrum=False)
                scattered = scattering.scatter_first_order(joint, knobs)
                theta_e, _ = params.detuning_split(theta, epsilon)
                expected = oracles.vacuum_spontaneous(0.02, theta_e)
                worst = max(worst, abs(report.dnu2 - expected))
                absorption = max(absorption, float(np.max(np.abs(scattered.absorption))))
                residue = max(residue, abs(report.decomposition_residue))
        return [
            gated("vacuum_dnu2 vs Y^2 sinc^2 max abs", 0.0, worst, worst, self.tol(1e-10)),
            gated("vacuum_absorption max|amplitude|", 0.0, absorption, absorption, 0.0),
            gated("vacuum_decomposition_residue", 0.0, residue, residue, self.tol(1e-12)),
        ]

    def squeezed_shift(self) -> List[CheckResult]:
        upsilon, theta, epsilon = 0.01, 1.0, 0.1
        theta_e, theta_a = params.detuning_split(theta, epsilon)
        difference = sinc(0.5 * theta_e) ** 2 - sinc(0.5 * theta_a) ** 2

        def dnu2(nu0: float, xi_sq: float, ordering: Ordering) -> float:
            knobs = DimensionlessParams(upsilon=upsilon, theta=theta, epsilon=epsilon, nu0=nu0, xi_sq=xi_sq)
            report, _ = self.channels(knobs, self.settings(PhotonKind.SQUEEZED, ordering=ordering))
            return report.dnu2

        results = []
        worst = 0.0
        baseline = dnu2(0.0, 0.0, Ordering.SD)
        for xi_sq in (0.5, -0.5, 1.0, -1.0):
            expected = upsilon**2 * math.sinh(abs(xi_sq)) ** 2 * difference
            worst = max(worst, relative_error(dnu2(0.0, xi_sq, Ordering.SD) - baseline, expected))
        results.append(gated("squeezed_vacuum_shift max rel", 0.0, worst, worst, self.tol(1e-6)))

        nu0 = 4.0
        for ordering in (Ordering.SD, Ordering.DS):
            shift = dnu2(nu0, 1.0, ordering) - dnu2(nu0, 0.0, ordering)
            expected = upsilon**2 * math.sinh(1.0) ** 2 * difference
            results.append(reported(
                f"squeezed_shift nu0=4 {ordering.value} rel dev",
                "0",
                f"{relative_error(shift, expected):.6e}",
            ))
        return results

    def _richardson(self, name: str, error: Callable[[float], float]) -> CheckResult:
        """error(ε)/ε² must not grow as ε halves over 0.2, 0.1, 0.05."""
        ratios = oracles.richardson_ratios(error, (0.2, 0.1, 0.05))
        growth = max(
            (later / earlier for earlier, later in zip(ratios, ratios[1:]) if earlier > 1e-15),
            default=0.0,
        )
        return gated(f"{name} growth per halving", "<=1.1", growth, growth, self.tol(1.1))

    def squeezed_fel(self) -> List[CheckResult]:
        upsilon, xi_sq, theta = 0.01, 1.0, FEL_GAIN_DETUNING
        stimulated = self._richardson(
            "squeezed_vacuum_amplification err/eps^2",
            lambda eps: oracles.stimulated_squeezed_error(upsilon, xi_sq, theta, eps),
        )
        full = [
            abs(
                oracles.squeezed_arc(upsilon, 0.0, xi_sq, 0.0, theta, eps, 0.0).dnu2
                - oracles.squeezed_vacuum_emission(upsilon, theta, eps, xi_sq)
            ) / eps**2
            for eps in (0.2, 0.1, 0.05)
        ]
        return [
            stimulated,
            reported(
                "squeezed_vacuum full formula diff/eps^2",
                "-",
                " ".join(f"{value:.4e}" for value in full),
            ),
        ]

    def fel_low_gain(self) -> List[CheckResult]:
        upsilon, nu0, theta = 0.01, 100.0, FEL_GAIN_DETUNING
        extremum = oracles.fel_gain_extremum()
        return [
            self._richardson(
                "fel_low_gain err/eps^2",
                lambda eps: oracles.stimulated_low_gain_error(upsilon, nu0, theta, eps),
            ),
            gated(
                "fel_gain_extremum detuning",
                FEL_GAIN_DETUNING,
                extremum,
                abs(extremum - FEL_GAIN_DETUNING),
                self.tol(1e-3),
            ),
        ]

    def arc_second_order(self) -> List[CheckResult]:
        worst = 0.0
        for gamma in (0.5, 1.0, 3.0, 4.0):
            knobs = DimensionlessParams(upsilon=0.01, theta=1.0, epsilon=0.1, gamma0=gamma, nu0=4.0)
            report, _ = self.channels(knobs, self.settings(PhotonKind.COHERENT))
            allowance = 1e-10 if gamma >= 3.0 else abs(report.cross_e) + 1e-10
            worst = max(worst, abs(report.dnu2 + report.de2) / allowance)
        return [gated("arc_r2 / allowance", "<=1", worst, worst, self.tol(1.0))]

    def arc_first_order(self) -> List[CheckResult]:
        ratios: Dict[Tuple[float, float], float] = {}
        for upsilon in (0.005, 0.02):
            for phi0 in (0.0, math.pi / 3.0, 1.0):
                knobs = DimensionlessParams(upsilon=upsilon, theta=1.0, phi0=phi0, gamma0=1.0, nu0=4.0)
                report, _ = self.channels(knobs, self.settings(PhotonKind.COHERENT))
                ratios[(upsilon, phi0)] = -report.de1 / report.dnu1
        phase_spread = max(
            abs(ratios[(u, p)] - ratios[(u, 0.0)]) for u, p in ratios
        )
        coupling_spread = max(
            abs(ratios[(0.02, p)] - ratios[(0.005, p)]) for _, p in ratios
        )
        ratio = ratios[(0.005, 0.0)]
        return [
            gated("arc_r1_ratio phase independence", 0.0, phase_spread, phase_spread, self.tol(1e-6)),
            gated("arc_r1_ratio coupling independence", 0.0, coupling_spread, coupling_spread, self.tol(1e-8)),
            reported("arc_r1_ratio -dE1/dnu1", "1.0 (closed form)", f"{ratio:#.4g}"),
        ]

    def signal_to_noise(self) -> List[CheckResult]:
        results = []
        for nu0, upsilon in ((100.0, 0.1), (25.0, 0.05)):
            expected = params.snr_max(nu0, upsilon)
            measured = oracles.max_signal_to_noise(nu0, upsilon)
            results.append(gated(
                f"snr_max nu0={nu0:g} Y={upsilon:g}",
                expected, measured, relative_error(measured, expected), self.tol(1e-4),
            ))
        return results

    def grid_robustness(self) -> List[CheckResult]:
        fine = Suite(self.scale, RunSettings(m_align=32, sigma_coverage=12.0))
        cases = [
            (PhotonKind.COHERENT, DimensionlessParams(upsilon=0.01, theta=1.0, epsilon=0.1, phi0=math.pi / 3, gamma0=0.5, nu0=4.0)),
            (PhotonKind.COHERENT, DimensionlessParams(upsilon=0.01, theta=2.6, gamma0=2.0, chirp=1.0, nu0=4.0)),
            (PhotonKind.FOCK, DimensionlessParams(upsilon=0.01, theta=1.0, epsilon=0.1, gamma0=1.0, nu0=5)),
            (PhotonKind.VACUUM, DimensionlessParams(upsilon=0.02, theta=1.0, epsilon=0.1, gamma0=1.0)),
            (PhotonKind.COHERENT, DimensionlessParams(upsilon=0.01, theta=1.0, phi0=math.pi / 3, gamma0=0.1, nu0=100.0)),
            (PhotonKind.SQUEEZED, DimensionlessParams(upsilon=0.01, theta=1.0, epsilon=0.1, gamma0=1.0, xi_sq=1.0)),
        ]
        worst = 0.0
        for kind, knobs in cases:
            coarse_report, _ = self.channels(knobs, self.settings(kind))
            fine_report, _ = fine.channels(knobs, fine.settings(kind))
            for name in ("dnu1", "dnu2", "de1", "de2"):
                worst = max(worst, abs(getattr(coarse_report, name) - getattr(fine_report, name)))
            worst = max(worst, abs(
                (coarse_report.dnu2 + coarse_report.de2) - (fine_report.dnu2 + fine_report.de2)
            ))
        return [gated("grid_refinement max change", 0.0, worst, worst, self.tol(1e-10))]

    def smith_purcell(self) -> List[CheckResult]:
        omega = params.angular_frequency(1e-6)
        length, beta, eta, area = 1e-3, 0.7, 0.1, 1e-10
        volume = oracles.matching_volume(omega, length, beta, eta, area)
        worst = 0.0
        for theta in (0.0, 1.0, 4.0):
            direct = oracles.smith_purcell_density(omega, length, eta, theta)
            pipeline = oracles.smith_purcell_pipeline(omega, length, beta, eta, theta, area, volume)
            worst = max(worst, relative_error(pipeline, direct))
        base = oracles.smith_purcell_density(omega, length, eta, 1.0)
        length_scaling = oracles.smith_purcell_density(omega, 2 * length, eta, 1.0) / base
        eta_scaling = oracles.smith_purcell_density(omega, length, 2 * eta, 1.0) / base
        golden = oracles.smith_purcell_density(omega, length, eta, 0.0)
        return [
            gated("smith_purcell direct vs pipeline", 0.0, worst, worst, self.tol(1e-12)),
            gated("smith_purcell L^2 scaling", 4.0, length_scaling, abs(length_scaling - 4.0), self.tol(1e-14)),
            gated("smith_purcell eta^2 scaling", 4.0, eta_scaling, abs(eta_scaling - 4.0), self.tol(1e-14)),
            gated(
                "smith_purcell golden row",
                SMITH_PURCELL_GOLDEN, golden,
                relative_error(golden, SMITH_PURCELL_GOLDEN), self.tol(1e-8),
            ),
        ]

    def determinism(self) -> List[CheckResult]:
        cfg = RunConfig.from_mapping({
            "photon.kind": "coherent", "photon.nu0": 4.0, "scenario.gamma0": 0.7,
            "scenario.theta": 1.0, "run.epsilon": 0.1, "scenario.phi0": 0.3,
            "arc_scan.steps": 9,
        })

        def outputs() -> str:
            row, _, _ = simulate_config(cfg)
            annotations, columns, rows = arc_scan_table(cfg)
            extinction_map_columns, extinction_map_rows = extinction_map_table(cfg)
            return (
                csvio.render(cfg.header_lines(), row.header(), [row.as_list()])
                + csvio.render(cfg.header_lines(), columns, rows, annotations)
                + csvio.render(cfg.header_lines(), extinction_map_columns, extinction_map_rows)
            )

        first, second = outputs(), outputs()
        mismatched = 0.0 if first == second else 1.0
        return [gated("byte_identical outputs", 0.0, mismatched, mismatched, 0.0)]

    def checks(self) -> List[Callable[[], List[CheckResult]]]:
        return [
            self.fock_nullity,
            self.coherent_first_order,
            self.extinction_law,
            self.gamma_formula,
            self.second_order,
            self.vacuum_emission,
            self.squeezed_shift,
            self.squeezed_fel,
            self.fel_low_gain,
            self.arc_second_order,
            self.arc_first_order,
            self.signal_to_noise,
            self.grid_robustness,
            self.smith_purcell,
            self.determinism,
        ]

    def run(self) -> List[CheckResult]:
        results: List[CheckResult] = []
        for check in self.checks():
            log.info(f"Running {check.__name__}")
            results.extend(check())
        return results


def render_table(results: Iterable[CheckResult]) -> str:
    header = ("check", "expected", "measured", "tolerance", "status")
    rows = [header] + [
        (r.name, r.expected, r.measured, r.tolerance, r.status) for r in results
    ]
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = ["  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() for row in rows]
    return "\n".join(lines) + "\n"


def run(args: argparse.Namespace, runtime: RuntimeSettings) -> int:
    results = Suite(args.tolerance_scale).run()
    print(render_table(results), end="")
    failures = [r.name for r in results if r.failed]
    if failures:
        raise CheckFailure(f"{len(failures)} check(s) failed: {', '.join(failures)}")
    log.info(f"All {len(results)} checks passed or reported")
    return 0


def setup(subparsers) -> None:
    parser = subparsers.add_parser(
        "verify", parents=[common_parser()], help="run the built-in acceptance suite"
    )
    parser.add_argument(
        "--tolerance-scale", type=float, default=1.0,
        help="multiply every tolerance (0 makes gated checks fail)",
    )
    parser.set_defaults(handler=run)
