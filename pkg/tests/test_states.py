import logging
import math

import numpy as np
import pytest
from scipy import linalg, stats

from arcsim import params, states
from arcsim.errors import CoverageError, DomainError, TruncationError, ValidationError
from arcsim.models import MomentumGrid, Ordering, PhotonKind

SEEDS = [0, 1, 2, 3, 4]


def test_momentum_grid_covers_wavepacket_and_sidebands():
    grid = states.momentum_grid(0.5)
    assert grid.m_align == 16
    assert grid.half_width == math.ceil((8 * 0.5 + 2) * 16)
    assert grid.extent >= 8 * 0.5 + 2
    assert grid.offsets()[grid.half_width] == 0.0


def test_momentum_grid_refines_for_strong_chirp():
    grid = states.momentum_grid(0.5, chirp=200.0)
    assert grid.m_align == 128


def test_momentum_grid_rejects_bad_input():
    with pytest.raises(ValidationError):
        states.momentum_grid(0.0)
    with pytest.raises(ValidationError):
        states.momentum_grid(0.5, sigma_coverage=4.0)


@pytest.mark.parametrize("m_align", [4, 9, 17])
def test_odd_or_small_alignment_is_rejected(m_align):
    with pytest.raises(ValidationError) as excinfo:
        states.momentum_grid(0.5, m_align=m_align)
    assert excinfo.value.field == "m_align"
    with pytest.raises(ValidationError):
        MomentumGrid(half_width=100, m_align=m_align)


def test_unchirped_wavepacket_is_real_positive_and_normalized():
    grid = states.momentum_grid(0.7)
    electron = states.gaussian_wavepacket(0.7, 0.0, grid)
    assert np.all(electron.amplitudes.imag == 0.0)
    assert np.all(electron.amplitudes.real > 0.0)
    assert electron.norm == pytest.approx(1.0, abs=1e-12)
    assert not electron.amplitudes.flags.writeable


@pytest.mark.parametrize(
    "gamma0, chirp",
    [(0.1, 0.0), (0.5, 1.0), (1.0, -1.0), (1.0, 5.0), (3.0, 0.3), (0.5, -5.0)],
)
def test_shifted_overlap_is_extinction_factor(gamma0, chirp):
    rho = 0.5 / gamma0
    grid = states.momentum_grid(rho, chirp)
    electron = states.gaussian_wavepacket(rho, chirp, grid)
    expected = params.extinction(params.gamma(gamma0, chirp))
    overlap = states.shifted_overlap(electron)
    assert electron.norm == pytest.approx(1.0, abs=1e-12)
    assert abs(overlap) == pytest.approx(expected, abs=1e-8)
    assert abs(overlap.imag) < 1e-12
    assert electron.gamma == pytest.approx(params.gamma(gamma0, chirp))


def test_shifted_overlap_backwards_is_conjugate():
    grid = states.momentum_grid(0.5, 2.0)
    electron = states.gaussian_wavepacket(0.5, 2.0, grid)
    forward = states.shifted_overlap(electron, 1)
    backward = states.shifted_overlap(electron, -1)
    assert backward == pytest.approx(forward.conjugate(), abs=1e-15)
    assert states.shifted_overlap(electron, 10**6) == 0j


def test_wavepacket_on_narrow_grid_reports_required_width():
    grid = states.momentum_grid(0.5)
    with pytest.raises(CoverageError) as excinfo:
        states.gaussian_wavepacket(1.0, 0.0, grid)
    assert excinfo.value.required_half_width == 160


def test_fock_state():
    state = states.fock_state(3)
    assert state.n_max == 5
    assert state.kind is PhotonKind.FOCK
    assert state.amplitudes[3] == 1.0
    expectations = states.photon_expectations(state)
    assert expectations.a == 0
    assert expectations.n == 3.0
    assert expectations.aa_dag == 4.0
    assert states.fock_state(0).kind is PhotonKind.VACUUM


def test_fock_state_above_cutoff():
    with pytest.raises(TruncationError) as excinfo:
        states.fock_state(6, n_max=4)
    assert excinfo.value.required == 8
    with pytest.raises(ValidationError):
        states.fock_state(2.5)


def test_coherent_state_expectations():
    state = states.coherent_state(100.0)
    expectations = states.photon_expectations(state)
    assert expectations.a.real == pytest.approx(10.0, abs=1e-10)
    assert expectations.a.imag == 0.0
    assert expectations.n == pytest.approx(100.0, abs=1e-10)
    assert expectations.aa_dag == pytest.approx(101.0, abs=1e-10)
    assert state.norm == pytest.approx(1.0, abs=1e-12)
    assert np.all(state.amplitudes.real >= 0)


def test_coherent_state_tail_budget():
    state = states.coherent_state(100.0, n_max=250)
    assert state.tail_mass < 1e-12
    assert state.tail_mass == pytest.approx(stats.poisson.sf(250, 100.0))
    with pytest.raises(TruncationError) as excinfo:
        states.coherent_state(100.0, n_max=200)
    assert excinfo.value.required == states.required_cutoff(100.0)


def test_coherent_vacuum():
    state = states.coherent_state(0.0)
    assert state.kind is PhotonKind.VACUUM
    assert state.amplitudes[0] == 1.0
    assert state.norm == 1.0


def test_coherent_state_is_cached():
    first = states.coherent_state(9.0)
    assert states.coherent_state(9.0) is first
    assert len(states.photon_cache) == 1


def test_unsqueezed_state_matches_coherent():
    squeezed = states.squeezed_coherent_state(9.0, 0.0, n_max=80)
    coherent = states.coherent_state(9.0, n_max=80)
    np.testing.assert_allclose(squeezed.amplitudes, coherent.amplitudes, rtol=0, atol=1e-12)


@pytest.mark.parametrize("xi_sq", [1.0, -1.0])
def test_squeezed_vacuum_photon_number(xi_sq):
    state = states.squeezed_coherent_state(0.0, xi_sq)
    expectations = states.photon_expectations(state)
    assert expectations.n == pytest.approx(math.sinh(1.0) ** 2, abs=1e-8)
    assert state.tail_mass <= states.TAIL_BUDGET
    assert np.all(state.amplitudes[1::2] == 0.0)


def test_squeezed_vacuum_matches_matrix_exponential():
    n_max, xi_sq = 80, 0.5
    a = np.diag(np.sqrt(np.arange(1, n_max + 1)), k=1)
    generator = 0.5 * xi_sq * (a @ a - a.T @ a.T)
    vacuum = np.zeros(n_max + 1)
    vacuum[0] = 1.0
    reference = linalg.expm(generator) @ vacuum

    state = states.squeezed_coherent_state(0.0, xi_sq, n_max=n_max)
    np.testing.assert_allclose(state.amplitudes.real[:40], reference[:40], rtol=0, atol=1e-10)
    assert np.all(np.abs(reference[1:40:2]) < 1e-14)


def test_squeezed_orderings(caplog):
    nu0, xi_sq = 4.0, 0.5
    ds = states.photon_expectations(states.squeezed_coherent_state(nu0, xi_sq, Ordering.DS))
    assert ds.a.real == pytest.approx(2.0, abs=1e-8)
    assert ds.n == pytest.approx(nu0 + math.sinh(xi_sq) ** 2, abs=1e-8)

    with caplog.at_level(logging.WARNING, logger="arcsim.states"):
        sd = states.photon_expectations(states.squeezed_coherent_state(nu0, xi_sq, Ordering.SD))
    assert sd.a.real == pytest.approx(2.0 * math.exp(-xi_sq), abs=1e-8)
    assert sd.a_discrepancy > 0.5
    assert "not √ν₀" in caplog.text


def test_squeezed_state_refusals():
    with pytest.raises(DomainError):
        states.squeezed_coherent_state(0.0, 5.5)
    with pytest.raises(TruncationError) as excinfo:
        states.squeezed_coherent_state(0.0, 2.0, n_max=10)
    assert excinfo.value.required > 10


def test_mandel_q():
    assert states.mandel_q(states.fock_state(5)) == pytest.approx(-1.0)
    assert states.mandel_q(states.coherent_state(25.0)) == pytest.approx(0.0, abs=1e-8)
    assert states.mandel_q(states.squeezed_coherent_state(0.0, 0.5)) > 0
    assert states.mandel_q(states.fock_state(0)) == 0.0


def test_joint_state_marginals():
    grid = states.momentum_grid(0.5, 1.0)
    electron = states.gaussian_wavepacket(0.5, 1.0, grid)
    photon = states.coherent_state(4.0)
    joint = states.joint_state(electron, photon)
    assert joint.amplitudes.shape == (grid.size, photon.n_max + 1)
    assert joint.norm == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(
        joint.electron_marginal(), np.abs(electron.amplitudes) ** 2 * photon.norm, atol=1e-14
    )
    np.testing.assert_allclose(
        joint.photon_marginal(), states.photon_number_distribution(photon) * electron.norm, atol=1e-14
    )


@pytest.mark.parametrize(
    "kind, nu0, expected_kind, expected_n_max",
    [
        (PhotonKind.VACUUM, 7.0, PhotonKind.VACUUM, 2),
        (PhotonKind.FOCK, 5, PhotonKind.FOCK, 7),
        (PhotonKind.COHERENT, 4.0, PhotonKind.COHERENT, states.required_cutoff(4.0)),
    ],
)
def test_photon_state_dispatch(kind, nu0, expected_kind, expected_n_max):
    state = states.photon_state(kind, nu0, n_max=0)
    assert state.kind is expected_kind
    assert state.n_max == expected_n_max


def test_photon_state_squeezed():
    state = states.photon_state("squeezed", 0.0, 0.5, "DS")
    assert state.kind is PhotonKind.SQUEEZED
    assert state.ordering is Ordering.DS


@pytest.mark.parametrize("seed", SEEDS)
def test_constructors_are_normalized_over_random_inputs(seed):
    rng = np.random.default_rng(seed)
    rho = rng.uniform(0.2, 3.0)
    chirp = rng.uniform(-5.0, 5.0)
    nu0 = rng.uniform(0.0, 100.0)
    xi_sq = rng.uniform(-1.2, 1.2)

    electron = states.gaussian_wavepacket(rho, chirp, states.momentum_grid(rho, chirp))
    assert electron.norm == pytest.approx(1.0, abs=1e-12)

    coherent = states.coherent_state(nu0)
    assert coherent.norm == pytest.approx(1.0, abs=2e-12)
    assert coherent.norm + coherent.tail_mass == pytest.approx(1.0, abs=1e-13)

    for ordering in Ordering:
        squeezed = states.squeezed_coherent_state(nu0, xi_sq, ordering)
        assert squeezed.tail_mass <= states.TAIL_BUDGET
        assert squeezed.norm == pytest.approx(1.0, abs=1e-10)

    fock = states.fock_state(int(nu0))
    assert fock.norm == 1.0


@pytest.mark.parametrize("seed", SEEDS)
def test_coherent_light_is_poissonian(seed):
    rng = np.random.default_rng(seed)
    for nu0 in rng.uniform(1.0, 400.0, size=4):
        p = states.photon_number_distribution(states.coherent_state(nu0))
        n = np.arange(len(p))
        mean = math.fsum(n * p)
        variance = math.fsum(n * n * p) - mean * mean
        assert mean == pytest.approx(nu0, rel=1e-10)
        assert variance / mean == pytest.approx(1.0, abs=1e-6)
