"""
Dimensionless parameter algebra.
Converts physical scenarios to the dimensionless knobs of the simulator and
evaluates the scalar relations that need no state: wavepacket extinction,
spreading, detuning, signal-to-noise and the squeezing temperature mapping.
"""

import logging
import math
from typing import Optional, Tuple

from scipy import constants

from arcsim.errors import DomainError, ValidationError
from arcsim.models import DimensionlessParams, PhysicalScenario

log = logging.getLogger(__name__)

COMPTON_WAVELENGTH = constants.h / (constants.m_e * constants.c)
IMPEDANCE_OF_FREE_SPACE = math.sqrt(constants.mu_0 / constants.epsilon_0)


def lorentz_factor(beta: float) -> float:
    if not 0.0 < beta < 1.0:
        raise ValidationError("beta", f"must lie in (0, 1), got {beta}")
    return 1.0 / math.sqrt(1.0 - beta * beta)


def angular_frequency(wavelength: float) -> float:
    return 2.0 * math.pi * constants.c / wavelength


def spreading_rate(sigma_z0: float, beta: float) -> float:
    """ξ = 2σ_p0²/(m*ħ) for a minimum-uncertainty wavepacket, m* = γ³m."""
    effective_mass = lorentz_factor(beta) ** 3 * constants.m_e
    sigma_p0 = constants.hbar / (2.0 * sigma_z0)
    return 2.0 * sigma_p0 * sigma_p0 / (effective_mass * constants.hbar)


def chirp_from_drift(drift_length: float, sigma_z0: float, beta: float) -> float:
    """c_D = ξ·t_D with t_D = L_D/v₀; negative drift gives a converging wavepacket."""
    return spreading_rate(sigma_z0, beta) * drift_length / (beta * constants.c)


def coupling_from_field(field: float, length: float, omega: float) -> float:
    """Υ̃ = eẼ_qz·L/(4ħω)."""
    return constants.e * abs(field) * length / (4.0 * constants.hbar * omega)


def classical_amplitude(upsilon: float, nu0: float) -> float:
    """eE_z,cl·L/ħω expressed through the quantum coupling: 4Υ̃√ν₀."""
    return 4.0 * upsilon * math.sqrt(nu0)


def _require_positive(name: str, value: float) -> None:
    if not value > 0:
        raise ValidationError(name, f"must be > 0, got {value}")


def derive_dimensionless(scenario: PhysicalScenario) -> DimensionlessParams:
    """Convert a physical scenario into dimensionless knobs."""
    lorentz_factor(scenario.beta)
    _require_positive("wavelength", scenario.wavelength)
    _require_positive("length", scenario.length)
    _require_positive("sigma_z0", scenario.sigma_z0)
    if scenario.nu0 < 0:
        raise ValidationError("nu0", f"must be >= 0, got {scenario.nu0}")

    if scenario.upsilon is not None:
        if scenario.upsilon < 0:
            raise ValidationError("upsilon", f"must be >= 0, got {scenario.upsilon}")
        upsilon = scenario.upsilon
    elif scenario.field is not None:
        upsilon = coupling_from_field(
            scenario.field, scenario.length, angular_frequency(scenario.wavelength)
        )
    else:
        raise ValidationError("upsilon", "either upsilon or field must be given")

    gamma0 = 2.0 * math.pi * scenario.sigma_z0 / (scenario.beta * scenario.wavelength)
    chirp = chirp_from_drift(scenario.drift_length, scenario.sigma_z0, scenario.beta)
    log.debug(f"Derived Γ₀={gamma0:.6g}, c_D={chirp:.6g}, Υ̃={upsilon:.6g}")
    return DimensionlessParams(
        upsilon=upsilon,
        theta=scenario.theta,
        epsilon=scenario.epsilon,
        phi0=scenario.phi0,
        gamma0=gamma0,
        chirp=chirp,
        nu0=scenario.nu0,
        xi_sq=scenario.xi_sq,
        lorentz_gamma=lorentz_factor(scenario.beta),
    )


def gamma(gamma0: float, chirp: float) -> float:
    """Extinction parameter Γ = Γ₀√(1 + c_D²)."""
    return gamma0 * math.hypot(1.0, chirp)


def extinction(gamma_value: float) -> float:
    """Suppression e^{−Γ²/2} of the phase-dependent interaction."""
    return math.exp(-0.5 * gamma_value * gamma_value)


def is_point_particle(gamma_value: float, threshold: float = 0.1) -> bool:
    """Γ ≪ 1: the wavepacket acts like a classical point charge."""
    return gamma_value < threshold


def wavepacket_size(
    sigma_z0: float,
    t_d: float,
    beta: float,
    lorentz_gamma: Optional[float] = None,
    form: str = "uncertainty",
) -> float:
    """
    Wavepacket length after drifting for t_d seconds.

    form="uncertainty" uses σ_z² = σ_z0² + (λ*_c·c·t_D/(4πσ_z0))², the spreading of a
    minimum-uncertainty packet, which agrees with Γ₀√(1+c_D²)·βλ/2π.
    form="printed" uses the prefactor 1/(4πβ) on (λ*_c·c·t_D/σ_z0)² instead.
    """
    if sigma_z0 <= 0:
        raise DomainError("sigma_z0 must be > 0: a wavepacket can never be point-like")
    if lorentz_gamma is None:
        lorentz_gamma = lorentz_factor(beta)
    reduced_compton = COMPTON_WAVELENGTH / lorentz_gamma**3
    spread = reduced_compton * constants.c * t_d / sigma_z0
    if form == "uncertainty":
        growth = (spread / (4.0 * math.pi)) ** 2
    elif form == "printed":
        growth = spread * spread / (4.0 * math.pi * beta)
    else:
        raise ValueError(f"Unknown wavepacket size form: {form}")
    return math.sqrt(sigma_z0 * sigma_z0 + growth)


def detuning_split(theta: float, epsilon: float) -> Tuple[float, float]:
    """Emission and absorption detunings θ̄ ± ε/2."""
    half = 0.5 * epsilon
    return theta + half, theta - half


def detuning(omega: float, v0: float, qz: float, length: float) -> float:
    """Synchronism detuning θ̄ = (ω/v₀ − q_z)L."""
    return (omega / v0 - qz) * length


def smith_purcell_qz(omega: float, angle: float, grating_period: float, order: int) -> float:
    """Axial wavenumber of the synchronous Floquet harmonic over a grating."""
    return omega / constants.c * math.cos(angle) + order * 2.0 * math.pi / grating_period


def synchronous_angle(omega: float, beta: float, grating_period: float, order: int) -> float:
    """Emission angle at which a grating harmonic is exactly synchronous (θ̄ = 0)."""
    cosine = 1.0 / beta - order * 2.0 * math.pi * constants.c / (grating_period * omega)
    if abs(cosine) > 1.0:
        raise DomainError(f"No synchronous angle: cos Θ would be {cosine:.6g}")
    return math.acos(cosine)


def single_mode_field(omega: float, area: float, length: float, beta: float) -> float:
    """Transverse field of one photon in a mode of cross-section A_eff crossing for t = L/βc."""
    transit = length / (beta * constants.c)
    return math.sqrt(
        2.0 * constants.hbar * omega / (area * transit / IMPEDANCE_OF_FREE_SPACE)
    )


def snr_max(nu0: float, upsilon: float) -> float:
    """Peak phase-dependent signal over the spontaneous floor: 4√ν₀/Υ̃."""
    if upsilon <= 0:
        raise DomainError("snr_max requires upsilon > 0")
    if nu0 < 0:
        raise DomainError("snr_max requires nu0 >= 0")
    return 4.0 * math.sqrt(nu0) / upsilon


def unruh_temperature(xi_sq: float, omega: Optional[float] = None) -> float:
    """
    ħω/k_BT of the thermal occupation equal to the squeezing photon number,
    sinh²|ξ| = 1/(e^{ħω/k_BT} − 1). Returns inf (T = 0) for ξ = 0.
    """
    if xi_sq == 0:
        return math.inf
    occupation = math.sinh(abs(xi_sq)) ** 2
    return math.log1p(1.0 / occupation)


def squeeze_from_unruh(ratio: float) -> float:
    """|ξ| whose squeezing photon number matches ħω/k_BT = ratio."""
    if math.isinf(ratio):
        return 0.0
    if ratio <= 0:
        raise DomainError(f"hbar*omega/kT must be > 0, got {ratio}")
    return math.asinh(math.sqrt(1.0 / math.expm1(ratio)))


def unruh_temperature_kelvin(xi_sq: float, omega: float) -> float:
    return constants.hbar * omega / (constants.k * unruh_temperature(xi_sq, omega))


def squeeze_from_temperature(temperature: float, omega: float) -> float:
    if temperature <= 0:
        return 0.0
    return squeeze_from_unruh(constants.hbar * omega / (constants.k * temperature))


def quadrature_size(xi_sq: float) -> float:
    """Relative photon 'size' e^{−|ξ|} in the dimensionless quadratures."""
    return math.exp(-abs(xi_sq))
