"""
Data models for the interaction simulator.
This module defines the parameter sets, state containers and report records
that flow between the params, states, scattering and oracles modules.
Internal units: momentum in p_rec = ħω/v₀, energy in ħω.
"""

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from arcsim.errors import ValidationError
from arcsim.numerics import abs2, fsum_real


class PhotonKind(Enum):
    """Initial photon state families."""

    FOCK = "fock"
    COHERENT = "coherent"
    SQUEEZED = "squeezed"
    VACUUM = "vacuum"


class Ordering(Enum):
    """Operator ordering of a squeezed coherent state."""

    SD = "SD"  # S(ξ)D(α)|0⟩
    DS = "DS"  # D(α)S(ξ)|0⟩


class Dispersion(Enum):
    """Electron energy-momentum relation used for energy weights."""

    LINEAR = "linear"
    QUADRATIC = "quadratic"


class ArcSource(Enum):
    """Which closed form produced an ArcPrediction."""

    FOCK = "fock"
    COHERENT = "coherent"
    SQUEEZED = "squeezed"
    VACUUM = "vacuum"
    FEL_LOW_GAIN = "fel_low_gain"


@dataclass(frozen=True)
class PhysicalScenario:
    """Interaction instance in SI units."""

    wavelength: float
    beta: float
    length: float
    sigma_z0: float
    drift_length: float = 0.0
    nu0: float = 0.0
    xi_sq: float = 0.0
    phi0: float = 0.0
    theta: float = 0.0
    epsilon: float = 0.0
    upsilon: Optional[float] = None
    field: Optional[float] = None


@dataclass(frozen=True)
class DimensionlessParams:
    """All knobs of one interaction instance."""

    upsilon: float
    theta: float = 0.0
    epsilon: float = 0.0
    phi0: float = 0.0
    gamma0: float = 1.0
    chirp: float = 0.0
    nu0: float = 0.0
    xi_sq: float = 0.0
    p0_over_prec: float = math.inf
    hqz_over_prec: float = 0.0
    lorentz_gamma: float = 1.0

    def __post_init__(self):
        if not self.gamma0 > 0:
            raise ValidationError("gamma0", f"must be > 0, got {self.gamma0}")
        if self.nu0 < 0:
            raise ValidationError("nu0", f"must be >= 0, got {self.nu0}")
        if self.upsilon < 0:
            raise ValidationError("upsilon", f"must be >= 0, got {self.upsilon}")
        if not self.p0_over_prec > 0:
            raise ValidationError(
                "p0_over_prec", f"must be > 0, got {self.p0_over_prec}"
            )

    @property
    def rho(self) -> float:
        """σ_p0 in units of p_rec."""
        return 0.5 / self.gamma0

    @property
    def finite_momentum(self) -> bool:
        return math.isfinite(self.p0_over_prec)

    def with_values(self, **changes) -> "DimensionlessParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class MomentumGrid:
    """Symmetric momentum grid aligned so that p_rec = m_align·Δp."""

    half_width: int
    m_align: int = 16

    def __post_init__(self):
        if self.m_align < 8 or self.m_align % 2:
            raise ValidationError("m_align", f"must be an even number >= 8, got {self.m_align}")
        if self.half_width <= self.m_align:
            raise ValidationError(
                "half_width",
                f"must exceed m_align ({self.m_align}), got {self.half_width}",
            )

    @property
    def delta_p(self) -> float:
        return 1.0 / self.m_align

    @property
    def size(self) -> int:
        return 2 * self.half_width + 1

    @property
    def extent(self) -> float:
        """Half width in units of p_rec."""
        return self.half_width * self.delta_p

    def indices(self) -> np.ndarray:
        return np.arange(-self.half_width, self.half_width + 1)

    def offsets(self) -> np.ndarray:
        """(p − p₀)/p_rec at every grid point."""
        return self.indices() / self.m_align


@dataclass(frozen=True, eq=False)
class ElectronAmplitudes:
    """Discrete-normalized momentum amplitudes of the electron wavepacket."""

    amplitudes: np.ndarray
    grid: MomentumGrid
    rho: float
    chirp: float

    @property
    def gamma(self) -> float:
        return math.hypot(1.0, self.chirp) / (2.0 * self.rho)

    @property
    def norm(self) -> float:
        return fsum_real(abs2(self.amplitudes))


@dataclass(frozen=True, eq=False)
class PhotonAmplitudes:
    """Amplitudes over the truncated Fock basis 0..N_max."""

    amplitudes: np.ndarray
    kind: PhotonKind
    nu0: float
    xi_sq: float = 0.0
    ordering: Ordering = Ordering.SD
    tail_mass: float = 0.0

    @property
    def n_max(self) -> int:
        return len(self.amplitudes) - 1

    @property
    def norm(self) -> float:
        return fsum_real(abs2(self.amplitudes))


@dataclass(frozen=True)
class PhotonExpectations:
    """Ladder-operator expectation values of a photon state."""

    a: complex
    a_dag: complex
    n: float
    aa_dag: float
    nominal_a: float
    nominal_n: float

    @property
    def a_discrepancy(self) -> float:
        """Distance between the measured ⟨a⟩ and √ν₀."""
        return abs(self.a - self.nominal_a)

    @property
    def commutator(self) -> float:
        """⟨aa†⟩ − ⟨a†a⟩, equal to the state norm."""
        return self.aa_dag - self.n


@dataclass(frozen=True, eq=False)
class JointState:
    """Product electron-photon state c_{p,ν} = c_p·c_ν."""

    amplitudes: np.ndarray
    electron: ElectronAmplitudes
    photon: PhotonAmplitudes

    @property
    def grid(self) -> MomentumGrid:
        return self.electron.grid

    @property
    def n_max(self) -> int:
        return self.photon.n_max

    @property
    def norm(self) -> float:
        return fsum_real(abs2(self.amplitudes))

    def electron_marginal(self) -> np.ndarray:
        return abs2(self.amplitudes).sum(axis=1)

    def photon_marginal(self) -> np.ndarray:
        return abs2(self.amplitudes).sum(axis=0)


@dataclass(frozen=True, eq=False)
class ScatteredAmplitudes:
    """First-order emission and absorption channels indexed by final (p′, ν′)."""

    emission: np.ndarray
    absorption: np.ndarray
    truncated_mass: float
    scattered_norm: float
    perturbative_ratio: float


@dataclass
class ElectronSpectrum:
    """Post-interaction momentum marginal and its ±p_rec sideband windows."""

    offsets: np.ndarray
    marginal: np.ndarray
    central: float
    downshifted: float
    upshifted: float
    mean_shift: float
    grid: MomentumGrid

    @property
    def energies(self) -> np.ndarray:
        """Linear-dispersion energy axis in units of ħω."""
        return self.offsets


@dataclass
class InteractionReport:
    """Observables of one first-order interaction."""

    dnu1: float
    dnu2: float
    de1: float
    de2: float
    cross_nu: float
    cross_e: float
    dnu_direct: float = math.nan
    de_direct: float = math.nan
    norm_deficit: float = math.nan
    arc_r1: float = math.nan
    arc_r2: float = math.nan
    decomposition_residue: float = math.nan
    truncated_mass: float = 0.0
    spectrum: Optional[ElectronSpectrum] = None

    def scalars(self) -> Dict[str, float]:
        return {
            "dnu1": self.dnu1,
            "dnu2": self.dnu2,
            "de1": self.de1,
            "de2": self.de2,
            "cross_nu": self.cross_nu,
            "cross_e": self.cross_e,
            "dnu_direct": self.dnu_direct,
            "de_direct": self.de_direct,
            "norm_deficit": self.norm_deficit,
            "arc_r1": self.arc_r1,
            "arc_r2": self.arc_r2,
        }

    def is_finite(self) -> bool:
        return all(math.isfinite(value) for value in self.scalars().values())


@dataclass(frozen=True)
class ArcPrediction:
    """Closed-form photon-number changes; energy changes mirror them exactly."""

    dnu1: float
    dnu2: float
    source: ArcSource

    @property
    def de1(self) -> float:
        return -self.dnu1

    @property
    def de2(self) -> float:
        return -self.dnu2


@dataclass(frozen=True)
class OverlapFamily:
    """Zeroth and first moment of one Gaussian overlap family, closed form next to quadrature."""

    name: str
    closed_zeroth: complex
    quadrature_zeroth: complex
    closed_first: complex
    quadrature_first: complex


RESULT_COLUMNS: Tuple[str, ...] = (
    "dnu1_num",
    "dnu2_num",
    "dE1_num",
    "dE2_num",
    "cross_nu",
    "cross_E",
    "dnu_direct",
    "dE_direct",
    "arc_r1",
    "arc_r2",
    "norm_deficit",
    "oracle_dnu1",
    "oracle_dnu2",
    "gamma",
    "extinction",
)


@dataclass
class ResultRow:
    """One CSV row: the swept inputs followed by RESULT_COLUMNS."""

    inputs: List[Tuple[str, float]]
    values: Dict[str, float] = field(default_factory=dict)

    def header(self) -> List[str]:
        return [name for name, _ in self.inputs] + list(RESULT_COLUMNS)

    def as_list(self) -> List[float]:
        return [value for _, value in self.inputs] + [
            self.values[name] for name in RESULT_COLUMNS
        ]
