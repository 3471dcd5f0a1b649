"""
Closed-form references.
Analytic photon-number and energy changes for each photon state family, the
low-gain FEL limit, the Gaussian overlap families evaluated both in closed
form and by quadrature, and the Smith-Purcell spontaneous emission density.
Every ArcPrediction satisfies ΔE⁽ᵏ⁾ = −Δν⁽ᵏ⁾ by construction.
"""

import logging
import math
from typing import Callable, List, Sequence, Tuple

import numpy as np
from scipy import constants, integrate, optimize

from arcsim.models import ArcPrediction, ArcSource, OverlapFamily
from arcsim.numerics import sinc, sinc2_derivative
from arcsim.params import IMPEDANCE_OF_FREE_SPACE, detuning_split, extinction, single_mode_field

log = logging.getLogger(__name__)


def _lineshape(theta: float) -> float:
    return sinc(0.5 * theta) ** 2


def classical_point_energy(amplitude: float, theta: float, phi0: float) -> float:
    """Energy gained by a point charge in a classical field, amplitude = eE_z,cl·L/ħω."""
    return -amplitude * sinc(0.5 * theta) * math.cos(0.5 * theta + phi0)


def _first_order(upsilon: float, nu0: float, gamma: float, theta: float, phi0: float) -> float:
    return (
        4.0 * upsilon * math.sqrt(nu0) * extinction(gamma)
        * sinc(0.5 * theta) * math.cos(0.5 * theta + phi0)
    )


def _second_order(upsilon: float, occupation: float, theta: float, epsilon: float) -> float:
    theta_e, theta_a = detuning_split(theta, epsilon)
    return upsilon * upsilon * (
        (occupation + 1.0) * _lineshape(theta_e) - occupation * _lineshape(theta_a)
    )


def coherent_arc(
    upsilon: float, nu0: float, gamma: float, theta: float, epsilon: float, phi0: float
) -> ArcPrediction:
    if nu0 < 0:
        raise ValueError(f"nu0 must be >= 0, got {nu0}")
    return ArcPrediction(
        dnu1=_first_order(upsilon, nu0, gamma, theta, phi0),
        dnu2=_second_order(upsilon, nu0, theta, epsilon),
        source=ArcSource.COHERENT,
    )


def fock_arc(upsilon: float, nu0: float, theta: float, epsilon: float) -> ArcPrediction:
    """A number state carries no phase: only the second-order term survives."""
    return ArcPrediction(
        dnu1=0.0,
        dnu2=_second_order(upsilon, nu0, theta, epsilon),
        source=ArcSource.VACUUM if nu0 == 0 else ArcSource.FOCK,
    )


def vacuum_spontaneous(upsilon: float, theta: float) -> float:
    """Spontaneous emission driven by the zero-point field, Υ̃²sinc²(θ̄/2)."""
    return upsilon * upsilon * _lineshape(theta)


def squeezed_arc(
    upsilon: float,
    nu0: float,
    xi_sq: float,
    gamma: float,
    theta: float,
    epsilon: float,
    phi0: float,
) -> ArcPrediction:
    """Squeezing adds sinh²|ξ| effective photons to the phase-independent term."""
    occupation = nu0 + math.sinh(abs(xi_sq)) ** 2
    return ArcPrediction(
        dnu1=_first_order(upsilon, nu0, gamma, theta, phi0),
        dnu2=_second_order(upsilon, occupation, theta, epsilon),
        source=ArcSource.SQUEEZED,
    )


def squeezed_vacuum_emission(upsilon: float, theta: float, epsilon: float, xi_sq: float) -> float:
    """Squeezed vacuum amplified as if it held sinh²|ξ| photons, to first order in ε."""
    occupation = math.sinh(abs(xi_sq)) ** 2
    return upsilon * upsilon * (
        _lineshape(theta) + occupation * epsilon * sinc2_derivative(theta)
    )


def fel_low_gain(upsilon: float, nu0: float, theta: float, epsilon: float) -> float:
    """Low-gain FEL curve: Υ̃²{sinc²(θ̄/2) + ν₀ε·d[sinc²(θ̄/2)]/dθ̄}."""
    return upsilon * upsilon * (_lineshape(theta) + nu0 * epsilon * sinc2_derivative(theta))


def fel_gain_extremum() -> float:
    """Detuning at which the low-gain slope −d[sinc²(θ̄/2)]/dθ̄ peaks (≈ 2.606)."""
    result = optimize.minimize_scalar(
        sinc2_derivative,
        bounds=(0.5, 2.0 * math.pi - 0.5),
        method="bounded",
        options={"xatol": 1e-10},
    )
    return float(result.x)


def stimulated_low_gain_error(
    upsilon: float, nu0: float, theta: float, epsilon: float
) -> float:
    """
    Stimulated part of the exact second-order change minus the low-gain expansion.
    The spontaneous parts are evaluated at different detunings (θ̄ + ε/2 against θ̄),
    so only the ν₀-proportional remainder converges at O(ε³).
    """
    exact = fock_arc(upsilon, nu0, theta, epsilon).dnu2 - fock_arc(upsilon, 0, theta, epsilon).dnu2
    expansion = fel_low_gain(upsilon, nu0, theta, epsilon) - vacuum_spontaneous(upsilon, theta)
    return exact - expansion


def stimulated_squeezed_error(upsilon: float, xi_sq: float, theta: float, epsilon: float) -> float:
    """Same comparison for squeezed vacuum against its first-order amplification formula."""
    exact = (
        squeezed_arc(upsilon, 0.0, xi_sq, 0.0, theta, epsilon, 0.0).dnu2
        - fock_arc(upsilon, 0, theta, epsilon).dnu2
    )
    expansion = squeezed_vacuum_emission(upsilon, theta, epsilon, xi_sq) - vacuum_spontaneous(
        upsilon, theta
    )
    return exact - expansion


def richardson_ratios(
    error: Callable[[float], float], epsilons: Sequence[float], order: int = 2
) -> List[float]:
    """|error(ε)|/ε^order along a sequence of shrinking ε."""
    return [abs(error(eps)) / eps**order for eps in epsilons]


def max_signal_to_noise(nu0: float, upsilon: float) -> float:
    """
    Peak phase-dependent signal (point-particle limit, maximised over θ̄ and φ₀)
    over the peak spontaneous floor (maximised over θ̄).
    """

    def negative_signal(x: np.ndarray) -> float:
        return -abs(_first_order(upsilon, nu0, 0.0, x[0], x[1]))

    best = min(
        (
            optimize.minimize(
                negative_signal,
                np.array(start),
                method="Nelder-Mead",
                options={"xatol": 1e-10, "fatol": 1e-16, "maxiter": 4000},
            )
            for start in ((0.4, 0.3), (-0.5, 2.5), (1.0, -1.0))
        ),
        key=lambda result: result.fun,
    )
    floor = optimize.minimize_scalar(
        lambda theta: -vacuum_spontaneous(upsilon, theta),
        bounds=(-math.pi, math.pi),
        method="bounded",
        options={"xatol": 1e-10},
    )
    return float(-best.fun / -floor.fun)


def _packet(x: np.ndarray, rho: float, chirp: float) -> np.ndarray:
    """Continuum-normalized chirped Gaussian over x = (p − p₀)/p_rec."""
    return (2.0 * math.pi * rho * rho) ** -0.25 * np.exp(
        -(x * x) * complex(1.0, chirp) / (4.0 * rho * rho)
    )


def _quad_complex(integrand: Callable[[float], complex], bound: float) -> complex:
    options = {"limit": 400, "epsabs": 1e-14, "epsrel": 1e-12, "points": (-0.5, 0.0, 0.5)}
    real, _ = integrate.quad(lambda x: integrand(x).real, -bound, bound, **options)
    imag, _ = integrate.quad(lambda x: integrand(x).imag, -bound, bound, **options)
    return complex(real, imag)


def gaussian_overlaps(
    rho: float, chirp: float, hq: float = 0.0, pr: float = 0.0
) -> Tuple[OverlapFamily, OverlapFamily, OverlapFamily, OverlapFamily]:
    """
    The four Gaussian moment families behind the closed-form results, each as the
    approximate closed form and as adaptive quadrature over x = (p − p₀)/p_rec.

    rho is σ_p0/p_rec, hq = ħq_z/p₀, pr = p_rec/p₀. The two population families
    (emission, absorption) report their first moment in units of p₀; the two
    interference families report theirs as (p − p₀) in units of p_rec.
    """
    if not rho > 0:
        raise ValueError(f"rho must be > 0, got {rho}")
    bound = 12.0 * rho + 2.0
    damping = extinction(math.hypot(1.0, chirp) / (2.0 * rho))

    def packet(x: float) -> complex:
        return complex(_packet(np.asarray(x), rho, chirp))

    def population(x: float) -> float:
        return abs(packet(x)) ** 2

    # Populations of the recoil-shifted packet; x is the offset of the shifted momentum.
    def emission_weight(x: float) -> float:
        return (1.0 + pr * x - 0.5 * hq) ** 2 * population(x)

    def absorption_weight(x: float) -> float:
        return (1.0 + pr * x + 0.5 * hq) ** 2 * population(x)

    sigma_ratio_sq = (rho * pr) ** 2
    population_emission = OverlapFamily(
        name="population_emission",
        closed_zeroth=complex((1.0 - 0.5 * hq) ** 2 + sigma_ratio_sq),
        quadrature_zeroth=_quad_complex(emission_weight, bound),
        closed_first=1.0 + 0j,
        quadrature_first=_quad_complex(
            lambda x: emission_weight(x) * (1.0 + pr * (x - 1.0)), bound
        ),
    )
    population_absorption = OverlapFamily(
        name="population_absorption",
        closed_zeroth=complex((1.0 + 0.5 * hq) ** 2 + sigma_ratio_sq),
        quadrature_zeroth=_quad_complex(absorption_weight, bound),
        closed_first=1.0 + 0j,
        quadrature_first=_quad_complex(
            lambda x: absorption_weight(x) * (1.0 + pr * (x + 1.0)), bound
        ),
    )

    def emission_overlap(x: float) -> complex:
        prefactor = 1.0 + pr * (x + 1.0) - 0.5 * hq
        return complex(prefactor * (packet(x).conjugate() * packet(x + 1.0)).real)

    def absorption_overlap(x: float) -> complex:
        prefactor = 1.0 + pr * (x - 1.0) + 0.5 * hq
        return prefactor * packet(x).conjugate() * packet(x - 1.0)

    interference_emission = OverlapFamily(
        name="interference_emission",
        closed_zeroth=complex(damping),
        quadrature_zeroth=_quad_complex(emission_overlap, bound),
        closed_first=complex(-damping),
        quadrature_first=_quad_complex(lambda x: emission_overlap(x) * x, bound),
    )
    interference_absorption = OverlapFamily(
        name="interference_absorption",
        closed_zeroth=damping * (1.0 - complex(pr - hq, pr * chirp) / 2.0),
        quadrature_zeroth=_quad_complex(absorption_overlap, bound),
        closed_first=complex(damping),
        quadrature_first=_quad_complex(lambda x: absorption_overlap(x) * x, bound),
    )
    for family in (interference_emission, interference_absorption):
        log.debug(
            f"{family.name}: zeroth {family.closed_zeroth:.10g} vs {family.quadrature_zeroth:.10g}, "
            f"first {family.closed_first:.10g} vs {family.quadrature_first:.10g}"
        )
    return (
        population_emission,
        population_absorption,
        interference_emission,
        interference_absorption,
    )


def smith_purcell_density(omega: float, length: float, eta: float, theta: float) -> float:
    """
    Spontaneous Smith-Purcell photons per unit frequency and steradian:
    e²L²ω²Z₀|η|²sinc²(θ̄/2)/(64π²c²).
    """
    return (
        constants.e**2 * length**2 * omega**2 * IMPEDANCE_OF_FREE_SPACE * abs(eta) ** 2
        * _lineshape(theta)
        / (64.0 * math.pi**2 * constants.c**2)
    )


def photon_density_of_states(omega: float, volume: float) -> float:
    """Free-space ρ_ph(ω) = ω²V/(8π²c³)."""
    return omega * omega * volume / (8.0 * math.pi**2 * constants.c**3)


def smith_purcell_coupling(omega: float, length: float, beta: float, eta: float, area: float) -> float:
    """Υ̃ of the synchronous harmonic η·Ẽ_⊥0 of a single-photon mode."""
    field = abs(eta) * single_mode_field(omega, area, length, beta)
    return constants.e * field * length / (4.0 * constants.hbar * omega)


def smith_purcell_pipeline(
    omega: float, length: float, beta: float, eta: float, theta: float, area: float, volume: float
) -> float:
    """Density of states times vacuum emission with the coupling of a quantized mode."""
    upsilon = smith_purcell_coupling(omega, length, beta, eta, area)
    return photon_density_of_states(omega, volume) * vacuum_spontaneous(upsilon, theta)


def matching_volume(omega: float, length: float, beta: float, eta: float, area: float) -> float:
    """Quantization volume V at which the density-of-states route reproduces the direct density."""
    upsilon = smith_purcell_coupling(omega, length, beta, eta, area)
    per_volume = photon_density_of_states(omega, 1.0) * upsilon * upsilon
    return smith_purcell_density(omega, length, eta, 0.0) / per_volume
