"""
First-order photon exchange.
Applies the emission and absorption amplitudes to a joint electron-photon
state and derives the photon-number and energy changes, split into the
interference (first order) and scattering (second order) parts, along with
the direct expectation values over the assembled final state and the
post-interaction electron spectrum.

Amplitudes are indexed by the FINAL basis state (p′, ν′): emission at
(p′, ν′) is fed by the initial state at (p′ + p_rec, ν′ − 1), absorption by
(p′ − p_rec, ν′ + 1). With the grid aligned, a recoil is a shift by m_align
rows.
"""

import logging
import math
from typing import Optional, Tuple

import humanize
import numpy as np

from arcsim.errors import ConfigError, MemoryBudgetError, PerturbativeError, TruncationError
from arcsim.models import (
    DimensionlessParams,
    Dispersion,
    ElectronSpectrum,
    InteractionReport,
    JointState,
    MomentumGrid,
    PhotonKind,
    ScatteredAmplitudes,
)
from arcsim.numerics import abs2, fsum_real, sinc
from arcsim.params import detuning_split

log = logging.getLogger(__name__)

PERTURBATIVE_WARN = 0.1
PERTURBATIVE_LIMIT = 0.5
TRUNCATION_BUDGET = 1e-8
JOINT_MEMORY_BUDGET = 4 * 1024**3
# Grid×Fock complex arrays alive at once while scattering and reducing.
WORKING_ARRAYS = 8


def _prefactors(
    grid: MomentumGrid, params: DimensionlessParams
) -> Tuple[np.ndarray, np.ndarray]:
    """Recoil prefactors evaluated at each SOURCE row: (p ∓ ħq_z/2)/p₀, or 1."""
    if not params.finite_momentum:
        ones = np.ones(grid.size)
        return ones, ones
    p0 = params.p0_over_prec
    x = grid.offsets()
    half_q = 0.5 * params.hqz_over_prec
    return (p0 + x - half_q) / p0, (p0 + x + half_q) / p0


def perturbative_ratio(grid: MomentumGrid, n_max: int, params: DimensionlessParams) -> float:
    """Υ̃·√(N_max+1) times the largest recoil prefactor on the grid."""
    pref_e, pref_a = _prefactors(grid, params)
    max_pref = max(float(np.max(np.abs(pref_e))), float(np.max(np.abs(pref_a))))
    return params.upsilon * math.sqrt(n_max + 1) * max_pref


def joint_memory(grid: MomentumGrid, n_max: int) -> int:
    """Working memory in bytes needed to scatter a grid×(N_max+1) joint state."""
    return grid.size * (n_max + 1) * np.dtype(complex).itemsize * WORKING_ARRAYS


def check_budgets(
    grid: MomentumGrid,
    n_max: int,
    params: DimensionlessParams,
    memory_budget: int = JOINT_MEMORY_BUDGET,
) -> float:
    """
    Refuse a run before its joint state is allocated: the perturbative ratio must stay
    below its limit and the scattering arrays must fit in memory_budget. Returns the ratio.
    """
    ratio = perturbative_ratio(grid, n_max, params)
    if ratio > PERTURBATIVE_LIMIT:
        raise PerturbativeError(
            f"Υ̃·√(N_max+1)·prefactor = {ratio:.4g} exceeds {PERTURBATIVE_LIMIT} (N_max = {n_max})"
        )
    required = joint_memory(grid, n_max)
    if required > memory_budget:
        raise MemoryBudgetError(
            f"Joint state {grid.size}×{n_max + 1} needs about "
            f"{humanize.naturalsize(required, binary=True)} of working memory, above the "
            f"{humanize.naturalsize(memory_budget, binary=True)} budget",
            required_bytes=required,
        )
    return ratio


def scatter_first_order(joint: JointState, params: DimensionlessParams) -> ScatteredAmplitudes:
    """Emission and absorption channels of first-order perturbation theory."""
    c0 = joint.amplitudes
    rows, columns = c0.shape
    m = joint.grid.m_align
    n = np.arange(columns)
    pref_e, pref_a = _prefactors(joint.grid, params)

    ratio = perturbative_ratio(joint.grid, joint.n_max, params)
    if ratio > PERTURBATIVE_LIMIT:
        raise PerturbativeError(
            f"Υ̃·√(N_max+1)·prefactor = {ratio:.4g} exceeds {PERTURBATIVE_LIMIT}"
        )
    if ratio > PERTURBATIVE_WARN:
        log.warning(
            f"Υ̃·√(N_max+1)·prefactor = {ratio:.4g} is above {PERTURBATIVE_WARN}; "
            "first-order results may be inaccurate"
        )

    theta_e, theta_a = detuning_split(params.theta, params.epsilon)
    gain_e = params.upsilon * sinc(0.5 * theta_e) * np.exp(1j * (0.5 * theta_e + params.phi0))
    gain_a = -params.upsilon * sinc(0.5 * theta_a) * np.exp(-1j * (0.5 * theta_a + params.phi0))

    # Indexed by source (p, ν); mapped to final rows below.
    source_e = c0 * np.sqrt(n + 1)[None, :] * pref_e[:, None] * gain_e
    source_a = c0 * np.sqrt(n)[None, :] * pref_a[:, None] * gain_a

    emission = np.zeros_like(c0)
    absorption = np.zeros_like(c0)
    emission[: rows - m, 1:] = source_e[m:, :-1]
    absorption[m:, :-1] = source_a[: rows - m, 1:]

    weight_e = abs2(source_e)
    weight_a = abs2(source_a)
    scattered_norm = fsum_real(weight_e) + fsum_real(weight_a)
    truncated = (
        fsum_real(weight_e[:m])
        + fsum_real(weight_e[m:, -1])
        + fsum_real(weight_a[rows - m :])
    )
    log.debug(
        f"Scattered norm {scattered_norm:.6g}, truncated {truncated:.3g}, ratio {ratio:.4g}"
    )
    if scattered_norm > 0 and truncated > TRUNCATION_BUDGET * scattered_norm:
        raise TruncationError(
            f"{truncated:.3g} of scattered mass {scattered_norm:.3g} leaves the grid or the "
            "Fock ladder",
            required=joint.n_max + 1 if fsum_real(weight_e[m:, -1]) > 0 else None,
        )

    emission.setflags(write=False)
    absorption.setflags(write=False)
    return ScatteredAmplitudes(emission, absorption, truncated, scattered_norm, ratio)


def energy_offsets(
    grid: MomentumGrid,
    dispersion: Dispersion = Dispersion.LINEAR,
    params: Optional[DimensionlessParams] = None,
) -> np.ndarray:
    """E_p − E(p₀) in units of ħω for the chosen dispersion relation."""
    x = grid.offsets()
    if Dispersion(dispersion) is Dispersion.LINEAR:
        return x
    if params is None or not params.finite_momentum:
        raise ConfigError(
            "run.dispersion = quadratic needs a finite scenario.p0_over_prec"
        )
    return x + x * x / (2.0 * params.lorentz_gamma**2 * params.p0_over_prec)


def _energy_weights(
    joint: JointState, dispersion: Dispersion, params: Optional[DimensionlessParams]
) -> np.ndarray:
    energies = energy_offsets(joint.grid, dispersion, params)
    mean = fsum_real(joint.electron_marginal() * energies)
    return (energies - mean)[:, None]


def observables_channels(
    joint: JointState,
    scattered: ScatteredAmplitudes,
    dispersion: Dispersion = Dispersion.LINEAR,
    params: Optional[DimensionlessParams] = None,
) -> InteractionReport:
    """
    Photon-number and energy changes counted per channel.

    First order is the interference of the initial state with each channel,
    second order the channel populations; the emission-absorption cross term
    is reported on its own and kept out of both.
    """
    c0 = joint.amplitudes
    e, a = scattered.emission, scattered.absorption
    w = _energy_weights(joint, dispersion, params)
    nu = np.arange(c0.shape[1])[None, :]

    interference_e = (np.conj(c0) * e).real
    interference_a = (np.conj(c0) * a).real
    population_e = abs2(e)
    population_a = abs2(a)
    cross = (np.conj(e) * a).real

    return InteractionReport(
        dnu1=2.0 * fsum_real(interference_e) - 2.0 * fsum_real(interference_a),
        dnu2=fsum_real(population_e) - fsum_real(population_a),
        de1=2.0 * fsum_real((interference_e + interference_a) * w),
        de2=fsum_real((population_e + population_a) * w),
        cross_nu=2.0 * fsum_real(cross * nu),
        cross_e=2.0 * fsum_real(cross * w),
        truncated_mass=scattered.truncated_mass,
    )


def _final_amplitudes(joint: JointState, scattered: ScatteredAmplitudes) -> np.ndarray:
    return joint.amplitudes + scattered.emission + scattered.absorption


def observables_direct(
    joint: JointState,
    scattered: ScatteredAmplitudes,
    dispersion: Dispersion = Dispersion.LINEAR,
    params: Optional[DimensionlessParams] = None,
) -> Tuple[float, float, float]:
    """(Δν, ΔE, norm deficit) of the assembled, unrenormalized final state."""
    change = abs2(_final_amplitudes(joint, scattered)) - abs2(joint.amplitudes)
    w = _energy_weights(joint, dispersion, params)
    nu = np.arange(change.shape[1])[None, :]
    return (
        fsum_real(change * nu),
        fsum_real(change * w),
        -fsum_real(change),
    )


def arc_residual(report: InteractionReport) -> Tuple[float, float]:
    """Δν⁽ᵏ⁾ + ΔE⁽ᵏ⁾ for k = 1, 2 (ħω = 1)."""
    return report.dnu1 + report.de1, report.dnu2 + report.de2


def _window(marginal: np.ndarray, center: int, m: int) -> float:
    """
    Weight in [center − m/2, center + m/2]. m is even, so each boundary point is shared
    with the neighbouring window and counted half.
    """
    half = m // 2
    inner = fsum_real(marginal[center - half + 1 : center + half])
    return inner + 0.5 * (marginal[center - half] + marginal[center + half])


def electron_spectrum(joint: JointState, scattered: ScatteredAmplitudes) -> ElectronSpectrum:
    """Final momentum marginal and the populations of the central line and ±p_rec sidebands."""
    grid = joint.grid
    m = grid.m_align
    center = grid.half_width
    marginal = abs2(_final_amplitudes(joint, scattered)).sum(axis=1)
    offsets = grid.offsets()
    mean_shift = fsum_real(offsets * (marginal - joint.electron_marginal()))
    return ElectronSpectrum(
        offsets=offsets,
        marginal=marginal,
        central=_window(marginal, center, m),
        downshifted=_window(marginal, center - m, m),
        upshifted=_window(marginal, center + m, m),
        mean_shift=mean_shift,
        grid=grid,
    )


def sideband_spectrum(
    spectrum: ElectronSpectrum,
    dispersion: Dispersion = Dispersion.LINEAR,
    params: Optional[DimensionlessParams] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Electron energy spectrum: energy axis in ħω and the probability per grid bin."""
    return energy_offsets(spectrum.grid, dispersion, params), spectrum.marginal


def interaction_report(
    joint: JointState,
    params: DimensionlessParams,
    dispersion: Dispersion = Dispersion.LINEAR,
    spectrum: bool = True,
) -> InteractionReport:
    """Scatter once and collect every observable into one report."""
    scattered = scatter_first_order(joint, params)
    report = observables_channels(joint, scattered, dispersion, params)
    report.dnu_direct, report.de_direct, report.norm_deficit = observables_direct(
        joint, scattered, dispersion, params
    )
    report.arc_r1, report.arc_r2 = arc_residual(report)
    report.decomposition_residue = report.dnu_direct - (
        report.dnu1 + report.dnu2 + report.cross_nu
    )
    if joint.photon.kind is PhotonKind.VACUUM and abs(report.decomposition_residue) > 1e-12:
        log.warning(f"Vacuum decomposition residue {report.decomposition_residue:.3g}")
    if spectrum:
        report.spectrum = electron_spectrum(joint, scattered)
    if not report.is_finite():
        log.warning(f"Non-finite observable in report: {report.scalars()}")
    return report
