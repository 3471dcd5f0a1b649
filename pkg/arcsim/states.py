"""
State construction.
Builds the chirped Gaussian electron wavepacket on an aligned momentum grid,
the Fock-basis photon states (Fock, coherent, squeezed coherent) and their
product. Every returned array is read-only, so states can be shared between
workers and memoised.
"""

import logging
import math
import threading
from typing import Optional, Tuple

import numpy as np
from cachetools import LRUCache
from scipy import special, stats

from arcsim.errors import CoverageError, DomainError, TruncationError, ValidationError
from arcsim.models import (
    ElectronAmplitudes,
    JointState,
    MomentumGrid,
    Ordering,
    PhotonAmplitudes,
    PhotonExpectations,
    PhotonKind,
)
from arcsim.numerics import abs2, freeze, fsum_complex, fsum_real

log = logging.getLogger(__name__)

# Missing Fock mass tolerated silently, and the hard limit beyond which a state is refused.
TAIL_BUDGET = 1e-12
TAIL_LIMIT = 1e-10
MAX_SQUEEZE = 5.0
MAX_FOCK_CUTOFF = 1 << 21

# e^{-40.5}: aliasing of the sampled Gaussian products stays far below 1e-16.
_ALIAS_MARGIN = 9.0
_COVERAGE_SIGMAS = 8.0
_RESCALE_ABOVE = 1e150

photon_cache = LRUCache(maxsize=128)
_cache_lock = threading.Lock()


def _alias_margin(rho: float, chirp: float, m_align: int) -> float:
    return (2.0 * math.pi * m_align - abs(chirp) / (2.0 * rho * rho)) * rho


def momentum_grid(
    rho: float, chirp: float = 0.0, m_align: int = 16, sigma_coverage: float = 8.0
) -> MomentumGrid:
    """
    Smallest aligned grid that covers sigma_coverage standard deviations plus both
    sidebands, refining m_align (by doubling) until the chirped wavepacket is resolved.
    """
    if not rho > 0:
        raise ValidationError("rho", f"must be > 0, got {rho}")
    if m_align < 8 or m_align % 2:
        raise ValidationError("m_align", f"must be an even number >= 8, got {m_align}")
    if sigma_coverage < _COVERAGE_SIGMAS:
        raise ValidationError(
            "sigma_coverage", f"must be >= {_COVERAGE_SIGMAS}, got {sigma_coverage}"
        )
    while _alias_margin(rho, chirp, m_align) < _ALIAS_MARGIN:
        m_align *= 2
    half_width = math.ceil((sigma_coverage * rho + 2.0) * m_align)
    grid = MomentumGrid(half_width=half_width, m_align=m_align)
    log.debug(f"Momentum grid: {grid.size} points, m_align={m_align}, ρ={rho:.6g}")
    return grid


def gaussian_wavepacket(rho: float, chirp: float, grid: MomentumGrid) -> ElectronAmplitudes:
    """
    Chirped Gaussian c_k ∝ exp(−x²(1 + i·c_D)/(4ρ²)), x = (p − p₀)/p_rec, normalized so
    that Σ|c_k|² = 1. The global drift phase is left out.
    """
    if not rho > 0:
        raise ValidationError("rho", f"must be > 0, got {rho}")
    required = math.ceil((_COVERAGE_SIGMAS * rho + 2.0) * grid.m_align)
    if grid.half_width < required:
        raise CoverageError(
            f"Grid half width {grid.half_width} covers less than 8σ plus both sidebands",
            required_half_width=required,
        )
    if _alias_margin(rho, chirp, grid.m_align) < _ALIAS_MARGIN:
        raise CoverageError(
            f"Grid spacing 1/{grid.m_align} does not resolve a wavepacket with "
            f"ρ={rho:.6g}, c_D={chirp:.6g}",
            required_half_width=required,
        )
    x = grid.offsets()
    amplitudes = np.exp(-(x * x) * complex(1.0, chirp) / (4.0 * rho * rho))
    amplitudes /= math.sqrt(fsum_real(abs2(amplitudes)))
    return ElectronAmplitudes(freeze(amplitudes), grid, rho, chirp)


def shifted_overlap(electron: ElectronAmplitudes, shift: int = 1) -> complex:
    """Σ_k c*_k c_{k+shift·m_align}: overlap with a copy displaced by shift recoils."""
    m = shift * electron.grid.m_align
    c = electron.amplitudes
    if m >= len(c):
        return 0j
    if m >= 0:
        return fsum_complex(np.conj(c[: len(c) - m]) * c[m:])
    return fsum_complex(np.conj(c[-m:]) * c[: len(c) + m])


def required_cutoff(nu0: float) -> int:
    """Fock cutoff ν₀ + 12√(ν₀+1) + 20 that keeps a Poisson tail below 1e-12."""
    return math.ceil(nu0 + 12.0 * math.sqrt(nu0 + 1.0) + 20.0)


def fock_state(nu0: int, n_max: Optional[int] = None) -> PhotonAmplitudes:
    """Number state |ν₀⟩ on 0..n_max (default ν₀ + 2, enough room for one emission)."""
    if nu0 < 0 or int(nu0) != nu0:
        raise ValidationError("nu0", f"a Fock state needs a non-negative integer, got {nu0}")
    nu0 = int(nu0)
    if n_max is None:
        n_max = nu0 + 2
    if nu0 > n_max:
        raise TruncationError(
            f"Fock state |{nu0}⟩ does not fit below N_max={n_max}", required=nu0 + 2
        )
    amplitudes = np.zeros(n_max + 1, dtype=complex)
    amplitudes[nu0] = 1.0
    kind = PhotonKind.VACUUM if nu0 == 0 else PhotonKind.FOCK
    return PhotonAmplitudes(freeze(amplitudes), kind, float(nu0))


def _coherent_amplitudes(nu0: float, n_max: int) -> np.ndarray:
    n = np.arange(n_max + 1)
    if nu0 == 0:
        amplitudes = np.zeros(n_max + 1, dtype=complex)
        amplitudes[0] = 1.0
        return amplitudes
    log_c = -0.5 * nu0 + 0.5 * n * math.log(nu0) - 0.5 * special.gammaln(n + 1)
    return np.exp(log_c).astype(complex)


def coherent_state(nu0: float, n_max: Optional[int] = None) -> PhotonAmplitudes:
    """Coherent state with real α = √ν₀; amplitudes e^{−ν₀/2}ν₀^{ν/2}/√(ν!) in log space."""
    if nu0 < 0:
        raise ValidationError("nu0", f"must be >= 0, got {nu0}")
    required = required_cutoff(nu0)
    if n_max is None:
        n_max = required
    if n_max < required:
        raise TruncationError(
            f"N_max={n_max} is too small for a coherent state with ν₀={nu0}",
            required=required,
        )
    key = ("coherent", float(nu0), n_max)
    with _cache_lock:
        cached = photon_cache.get(key)
    if cached is not None:
        return cached

    amplitudes = _coherent_amplitudes(nu0, n_max)
    tail = float(stats.poisson.sf(n_max, nu0)) if nu0 > 0 else 0.0
    state = PhotonAmplitudes(
        freeze(amplitudes), PhotonKind.VACUUM if nu0 == 0 else PhotonKind.COHERENT,
        float(nu0), tail_mass=tail,
    )
    with _cache_lock:
        photon_cache[key] = state
    return state


def _displacement(nu0: float, xi_sq: float, ordering: Ordering) -> float:
    """Displacement of the equivalent D(β)S(ξ)|0⟩ form; S·D(α) moves it to α·e^{−ξ}."""
    alpha = math.sqrt(nu0)
    if ordering is Ordering.SD:
        return alpha * math.exp(-xi_sq)
    return alpha


def _squeezed_recurrence(beta: float, xi_sq: float, n_max: int) -> np.ndarray:
    """
    Amplitudes of D(β)S(ξ)|0⟩ from
    cosh ξ·√(n+1)·c_{n+1} = β e^{ξ}·c_n − sinh ξ·√n·c_{n−1},
    carried as mantissa and running log scale so nothing overflows.
    """
    ch, sh = math.cosh(xi_sq), math.sinh(xi_sq)
    drive = beta * math.exp(xi_sq)
    log_c0 = -0.5 * beta * beta * (1.0 + math.tanh(xi_sq)) - 0.5 * math.log(ch)

    mantissa = np.zeros(n_max + 1)
    scale = np.zeros(n_max + 1)
    previous, current, log_scale = 0.0, 1.0, 0.0
    mantissa[0] = current
    for n in range(n_max):
        following = (drive * current - sh * math.sqrt(n) * previous) / (ch * math.sqrt(n + 1))
        previous, current = current, following
        magnitude = max(abs(previous), abs(current))
        if magnitude > _RESCALE_ABOVE:
            previous /= magnitude
            current /= magnitude
            log_scale += math.log(magnitude)
        mantissa[n + 1] = current
        scale[n + 1] = log_scale

    with np.errstate(under="ignore"):
        return mantissa * np.exp(scale + log_c0)


def _squeezed_amplitudes(
    nu0: float, xi_sq: float, ordering: Ordering, n_max: int
) -> Tuple[np.ndarray, float]:
    amplitudes = _squeezed_recurrence(_displacement(nu0, xi_sq, ordering), xi_sq, n_max)
    tail = max(0.0, 1.0 - fsum_real(amplitudes * amplitudes))
    return amplitudes.astype(complex), tail


def squeezed_coherent_state(
    nu0: float,
    xi_sq: float,
    ordering: Ordering = Ordering.SD,
    n_max: Optional[int] = None,
) -> PhotonAmplitudes:
    """
    Squeezed coherent state with real α = √ν₀ and real signed squeeze ξ_sq.
    ordering=SD builds S(ξ)D(α)|0⟩, ordering=DS builds D(α)S(ξ)|0⟩.
    """
    if nu0 < 0:
        raise ValidationError("nu0", f"must be >= 0, got {nu0}")
    if abs(xi_sq) > MAX_SQUEEZE:
        raise DomainError(
            f"|ξ_sq|={abs(xi_sq):.6g} exceeds {MAX_SQUEEZE}: Fock truncation is impractical"
        )
    ordering = Ordering(ordering)
    key = ("squeezed", float(nu0), float(xi_sq), ordering, n_max)
    with _cache_lock:
        cached = photon_cache.get(key)
    if cached is not None:
        return cached

    if n_max is None:
        beta = _displacement(nu0, xi_sq, ordering)
        n_max = required_cutoff(beta * beta + math.sinh(xi_sq) ** 2)
        amplitudes, tail = _squeezed_amplitudes(nu0, xi_sq, ordering, n_max)
        while tail > TAIL_BUDGET and n_max < MAX_FOCK_CUTOFF:
            n_max *= 2
            amplitudes, tail = _squeezed_amplitudes(nu0, xi_sq, ordering, n_max)
        log.debug(f"Squeezed state ν₀={nu0}, ξ={xi_sq}: N_max={n_max}, tail={tail:.3g}")
    else:
        amplitudes, tail = _squeezed_amplitudes(nu0, xi_sq, ordering, n_max)

    if tail > TAIL_LIMIT:
        required = n_max
        trial_tail = tail
        while trial_tail > TAIL_BUDGET and required < MAX_FOCK_CUTOFF:
            required *= 2
            _, trial_tail = _squeezed_amplitudes(nu0, xi_sq, ordering, required)
        raise TruncationError(
            f"Squeezed state loses {tail:.3g} of its norm above N_max={n_max}",
            required=required,
        )
    if tail > TAIL_BUDGET:
        log.warning(
            f"Squeezed state tail mass {tail:.3g} exceeds {TAIL_BUDGET:g} at N_max={n_max}"
        )

    state = PhotonAmplitudes(
        freeze(amplitudes), PhotonKind.SQUEEZED, float(nu0), float(xi_sq), ordering, tail
    )
    with _cache_lock:
        photon_cache[key] = state
    return state


def photon_expectations(state: PhotonAmplitudes) -> PhotonExpectations:
    """⟨a⟩, ⟨a†⟩, ⟨a†a⟩ and ⟨aa†⟩ by direct Fock summation."""
    c = state.amplitudes
    n = np.arange(len(c))
    a = fsum_complex(np.conj(c[:-1]) * np.sqrt(n[1:]) * c[1:])
    weights = abs2(c)
    number = fsum_real(n * weights)
    anti = fsum_real((n + 1) * weights)

    nominal_a = 0.0 if state.kind in (PhotonKind.FOCK, PhotonKind.VACUUM) else math.sqrt(state.nu0)
    nominal_n = state.nu0 + math.sinh(state.xi_sq) ** 2
    expectations = PhotonExpectations(a, a.conjugate(), number, anti, nominal_a, nominal_n)

    if abs(expectations.commutator - state.norm) > 1e-12:
        log.warning(f"⟨aa†⟩ − ⟨a†a⟩ = {expectations.commutator!r} differs from the norm")
    if state.kind is PhotonKind.SQUEEZED and expectations.a_discrepancy > 1e-8:
        log.warning(
            f"Squeezed state ({state.ordering.value}) has ⟨a⟩={a.real:.10g}, "
            f"not √ν₀={nominal_a:.10g}; ⟨a†a⟩={number:.10g}"
        )
    return expectations


def photon_number_distribution(state: PhotonAmplitudes) -> np.ndarray:
    """P(ν) = |c_ν|²."""
    return abs2(state.amplitudes)


def mandel_q(state: PhotonAmplitudes) -> float:
    """(Var ν − ⟨ν⟩)/⟨ν⟩: 0 for Poisson light, −1 for a Fock state, > 0 for squeezed vacuum."""
    p = photon_number_distribution(state)
    n = np.arange(len(p))
    mean = fsum_real(n * p)
    if mean == 0:
        return 0.0
    variance = fsum_real(n * n * p) - mean * mean
    return (variance - mean) / mean


def joint_state(electron: ElectronAmplitudes, photon: PhotonAmplitudes) -> JointState:
    """Product state c_{p,ν} = c_p·c_ν, rows over momentum and columns over ν."""
    amplitudes = np.outer(electron.amplitudes, photon.amplitudes)
    return JointState(freeze(amplitudes), electron, photon)


def photon_state(
    kind: PhotonKind,
    nu0: float,
    xi_sq: float = 0.0,
    ordering: Ordering = Ordering.SD,
    n_max: Optional[int] = None,
) -> PhotonAmplitudes:
    """Dispatch to the constructor for one photon state family."""
    kind = PhotonKind(kind)
    if n_max == 0:
        n_max = None
    if kind is PhotonKind.VACUUM:
        return fock_state(0, n_max if n_max is not None else 2)
    if kind is PhotonKind.FOCK:
        return fock_state(nu0, n_max)
    if kind is PhotonKind.COHERENT:
        return coherent_state(nu0, n_max)
    return squeezed_coherent_state(nu0, xi_sq, ordering, n_max)
