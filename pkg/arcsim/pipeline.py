"""
Run pipeline: configuration → dimensionless parameters → states → scattering
report and closed-form prediction → one result row.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from arcsim import oracles, params as params_mod, scattering, states
from arcsim.config import RunConfig
from arcsim.errors import ConfigError
from arcsim.models import (
    ArcPrediction,
    DimensionlessParams,
    Dispersion,
    InteractionReport,
    JointState,
    Ordering,
    PhotonKind,
    PhysicalScenario,
    ResultRow,
)

log = logging.getLogger(__name__)

# Inputs recorded in front of a single-simulation row, in this order.
PARAM_INPUTS = (
    "upsilon",
    "theta",
    "epsilon",
    "phi0",
    "gamma0",
    "chirp",
    "nu0",
    "xi_sq",
    "p0_over_prec",
    "hqz_over_prec",
)

PHYSICAL_KEYS = ("wavelength", "beta", "length", "sigma_z0")


@dataclass(frozen=True)
class RunSettings:
    """Everything besides the dimensionless knobs that shapes one evaluation."""

    kind: PhotonKind = PhotonKind.COHERENT
    ordering: Ordering = Ordering.SD
    n_max: Optional[int] = None
    m_align: int = 16
    sigma_coverage: float = 8.0
    dispersion: Dispersion = Dispersion.LINEAR

    @classmethod
    def from_config(cls, cfg: RunConfig) -> "RunSettings":
        return cls(
            kind=PhotonKind(cfg.photon.kind),
            ordering=Ordering(cfg.photon.ordering),
            n_max=cfg.photon.n_max or None,
            m_align=cfg.grid.m_align,
            sigma_coverage=cfg.grid.sigma_coverage,
            dispersion=Dispersion(cfg.run.dispersion),
        )


def _physical_scenario(cfg: RunConfig) -> Optional[PhysicalScenario]:
    scenario = cfg.scenario
    uses_physical = (
        scenario.sigma_z0 is not None
        or scenario.drift_length is not None
        or scenario.field is not None
    )
    if not uses_physical:
        return None
    missing = [f"scenario.{key}" for key in PHYSICAL_KEYS if getattr(scenario, key) is None]
    if missing:
        raise ConfigError(f"Physical scenario inputs need {', '.join(missing)}")
    field_driven = scenario.field is not None and not cfg.is_explicit("scenario.upsilon")
    return PhysicalScenario(
        wavelength=scenario.wavelength,
        beta=scenario.beta,
        length=scenario.length,
        sigma_z0=scenario.sigma_z0,
        drift_length=scenario.drift_length or 0.0,
        nu0=cfg.photon.nu0,
        xi_sq=cfg.photon.xi,
        phi0=scenario.phi0,
        theta=scenario.theta,
        epsilon=cfg.run.epsilon,
        upsilon=None if field_driven else scenario.upsilon,
        field=scenario.field,
    )


def _squeeze_from_temperature(cfg: RunConfig) -> float:
    """ξ whose squeezing photon number matches a thermal mode at photon.temperature."""
    temperature = cfg.photon.temperature
    if cfg.is_explicit("photon.xi"):
        raise ConfigError("Set photon.xi or photon.temperature, not both")
    if PhotonKind(cfg.photon.kind) is not PhotonKind.SQUEEZED:
        raise ConfigError("photon.temperature needs photon.kind = squeezed")
    if temperature < 0:
        raise ConfigError(f"photon.temperature must be >= 0 K, got {temperature}")
    if cfg.scenario.wavelength is None:
        raise ConfigError("photon.temperature needs scenario.wavelength")
    omega = params_mod.angular_frequency(cfg.scenario.wavelength)
    return params_mod.squeeze_from_temperature(temperature, omega)


def build_params(cfg: RunConfig) -> DimensionlessParams:
    """Dimensionless knobs of a run; explicit dimensionless keys beat derived ones."""
    scenario = cfg.scenario
    knobs = dict(
        upsilon=scenario.upsilon,
        theta=scenario.theta,
        epsilon=cfg.run.epsilon,
        phi0=scenario.phi0,
        gamma0=scenario.gamma0,
        chirp=scenario.chirp,
        nu0=cfg.photon.nu0,
        xi_sq=cfg.photon.xi,
        p0_over_prec=scenario.p0_over_prec,
        hqz_over_prec=scenario.hqz_over_prec,
    )
    physical = _physical_scenario(cfg)
    if physical is not None:
        derived = params_mod.derive_dimensionless(physical)
        for name in ("upsilon", "gamma0", "chirp"):
            if not cfg.is_explicit(f"scenario.{name}"):
                knobs[name] = getattr(derived, name)
        knobs["lorentz_gamma"] = derived.lorentz_gamma
    elif scenario.beta is not None:
        knobs["lorentz_gamma"] = params_mod.lorentz_factor(scenario.beta)

    if scenario.gamma is not None:
        knobs["gamma0"] = scenario.gamma / math.hypot(1.0, knobs["chirp"])
    if cfg.photon.temperature is not None:
        knobs["xi_sq"] = _squeeze_from_temperature(cfg)
    if PhotonKind(cfg.photon.kind) is PhotonKind.VACUUM:
        knobs["nu0"] = 0.0
    return DimensionlessParams(**knobs)


def build_joint(params: DimensionlessParams, settings: RunSettings) -> JointState:
    grid = states.momentum_grid(
        params.rho, params.chirp, settings.m_align, settings.sigma_coverage
    )
    electron = states.gaussian_wavepacket(params.rho, params.chirp, grid)
    photon = states.photon_state(
        settings.kind, params.nu0, params.xi_sq, settings.ordering, settings.n_max
    )
    ratio = scattering.check_budgets(grid, photon.n_max, params)
    log.debug(
        f"Joint state {grid.size}×{photon.n_max + 1} ({settings.kind.value}), "
        f"perturbative ratio {ratio:.3g}"
    )
    return states.joint_state(electron, photon)


def photon_summary(
    params: DimensionlessParams, settings: RunSettings, wavelength: Optional[float] = None
) -> Dict[str, float]:
    """Statistics of the incoming photon state; squeezed light adds its thermal mapping."""
    state = states.photon_state(
        settings.kind, params.nu0, params.xi_sq, settings.ordering, settings.n_max
    )
    summary = {
        "mean_photons": states.photon_expectations(state).n,
        "mandel_q": states.mandel_q(state),
    }
    if settings.kind is PhotonKind.SQUEEZED:
        summary["quadrature_size"] = params_mod.quadrature_size(params.xi_sq)
        summary["hbar_omega_over_kT"] = params_mod.unruh_temperature(params.xi_sq)
        if wavelength is not None:
            omega = params_mod.angular_frequency(wavelength)
            summary["temperature_K"] = params_mod.unruh_temperature_kelvin(params.xi_sq, omega)
    return summary


def predict(params: DimensionlessParams, kind: PhotonKind) -> ArcPrediction:
    """Closed-form counterpart of a run."""
    gamma = params_mod.gamma(params.gamma0, params.chirp)
    if kind in (PhotonKind.FOCK, PhotonKind.VACUUM):
        return oracles.fock_arc(params.upsilon, params.nu0, params.theta, params.epsilon)
    if kind is PhotonKind.SQUEEZED:
        return oracles.squeezed_arc(
            params.upsilon, params.nu0, params.xi_sq, gamma,
            params.theta, params.epsilon, params.phi0,
        )
    return oracles.coherent_arc(
        params.upsilon, params.nu0, gamma, params.theta, params.epsilon, params.phi0
    )


def evaluate(
    params: DimensionlessParams, settings: RunSettings
) -> Tuple[InteractionReport, ArcPrediction]:
    joint = build_joint(params, settings)
    report = scattering.interaction_report(joint, params, settings.dispersion)
    return report, predict(params, settings.kind)


def result_values(
    report: InteractionReport, prediction: ArcPrediction, params: DimensionlessParams
) -> Dict[str, float]:
    gamma = params_mod.gamma(params.gamma0, params.chirp)
    return {
        "dnu1_num": report.dnu1,
        "dnu2_num": report.dnu2,
        "dE1_num": report.de1,
        "dE2_num": report.de2,
        "cross_nu": report.cross_nu,
        "cross_E": report.cross_e,
        "dnu_direct": report.dnu_direct,
        "dE_direct": report.de_direct,
        "arc_r1": report.arc_r1,
        "arc_r2": report.arc_r2,
        "norm_deficit": report.norm_deficit,
        "oracle_dnu1": prediction.dnu1,
        "oracle_dnu2": prediction.dnu2,
        "gamma": gamma,
        "extinction": params_mod.extinction(gamma),
    }


def simulate_config(cfg: RunConfig) -> Tuple[ResultRow, InteractionReport, ArcPrediction]:
    """One full evaluation of a configuration; the row lists every dimensionless knob."""
    params = build_params(cfg)
    report, prediction = evaluate(params, RunSettings.from_config(cfg))
    inputs = [(name, float(getattr(params, name))) for name in PARAM_INPUTS]
    return ResultRow(inputs, result_values(report, prediction, params)), report, prediction


def axis(start: float, stop: float, steps: int, scale: str = "linear", key: str = "axis") -> np.ndarray:
    """Evenly spaced (linear) or geometrically spaced (log) sample points, endpoints included."""
    if steps < 1:
        raise ConfigError(f"{key}: steps must be >= 1, got {steps}")
    if steps == 1:
        return np.array([float(start)])
    if scale == "log":
        if start <= 0 or stop <= 0:
            raise ConfigError(f"{key}: a log axis needs positive bounds, got {start}..{stop}")
        return np.geomspace(start, stop, steps)
    return np.linspace(start, stop, steps)


def sweep_values(cfg: RunConfig) -> Tuple[str, List[float]]:
    """The swept key and its sample points, validated against the defaults."""
    key = cfg.sweep.parameter
    if not key:
        raise ConfigError("sweep.parameter is required for a sweep")
    if key.startswith("sweep.") or key.startswith("output."):
        raise ConfigError(f"sweep.parameter cannot be {key}")
    current = cfg.get(key)
    numeric = isinstance(current, float) or (current is None and key.startswith("scenario."))
    if not numeric:
        raise ConfigError(f"sweep.parameter {key} is not a numeric knob")
    points = axis(cfg.get("sweep.from"), cfg.get("sweep.to"), cfg.sweep.steps, cfg.sweep.scale, "sweep")
    return key, [float(value) for value in points]


def sweep_point(task: Tuple[RunConfig, str, float]) -> ResultRow:
    """Evaluate one sweep point; module level so a process pool can pickle it."""
    cfg, key, value = task
    row, _, _ = simulate_config(cfg.with_value(key, value))
    return ResultRow([(key, value)], row.values)
