import math

import pytest

from arcsim import oracles, params
from arcsim.models import ArcSource
from arcsim.numerics import sinc, sinc2_derivative


def test_fock_arc_has_no_phase_term():
    prediction = oracles.fock_arc(0.01, 5, 1.0, 0.1)
    assert prediction.dnu1 == 0.0
    assert prediction.source is ArcSource.FOCK
    assert oracles.fock_arc(0.01, 0, 1.0, 0.1).source is ArcSource.VACUUM


def test_predictions_conserve_energy():
    prediction = oracles.coherent_arc(0.02, 9.0, 0.7, 1.2, 0.1, 0.4)
    assert prediction.de1 == -prediction.dnu1
    assert prediction.de2 == -prediction.dnu2


def test_coherent_arc_point_particle_peak():
    prediction = oracles.coherent_arc(0.01, 100.0, 0.0, 0.0, 0.0, 0.0)
    assert prediction.dnu1 == pytest.approx(4 * 0.01 * 10)
    assert prediction.dnu2 == pytest.approx(0.01**2)


@pytest.mark.parametrize("theta, phi0", [(0.0, 0.0), (1.0, 0.3), (2.6, math.pi / 2 + 0.1)])
def test_point_particle_matches_classical_energy(theta, phi0):
    upsilon, nu0 = 0.01, 25.0
    quantum = oracles.coherent_arc(upsilon, nu0, 0.0, theta, 0.0, phi0)
    classical = oracles.classical_point_energy(
        params.classical_amplitude(upsilon, nu0), theta, phi0
    )
    assert quantum.de1 == pytest.approx(classical, rel=1e-14)


def test_coherent_arc_extinction():
    point = oracles.coherent_arc(0.01, 4.0, 0.0, 1.0, 0.0, 0.2).dnu1
    wide = oracles.coherent_arc(0.01, 4.0, 2.0, 1.0, 0.0, 0.2).dnu1
    assert wide / point == pytest.approx(math.exp(-2.0))


def test_squeezed_arc_adds_effective_photons():
    upsilon, theta, epsilon = 0.01, 1.0, 0.1
    squeezed = oracles.squeezed_arc(upsilon, 4.0, -0.8, 1.0, theta, epsilon, 0.0)
    coherent = oracles.coherent_arc(upsilon, 4.0, 1.0, theta, epsilon, 0.0)
    assert squeezed.dnu1 == coherent.dnu1
    shift = squeezed.dnu2 - coherent.dnu2
    expected = upsilon**2 * math.sinh(0.8) ** 2 * (
        sinc(0.5 * (theta + 0.05)) ** 2 - sinc(0.5 * (theta - 0.05)) ** 2
    )
    assert shift == pytest.approx(expected, rel=1e-10)
    assert squeezed.source is ArcSource.SQUEEZED


def test_vacuum_spontaneous():
    assert oracles.vacuum_spontaneous(0.1, 0.0) == pytest.approx(0.01)
    assert oracles.vacuum_spontaneous(0.1, 2 * math.pi) == pytest.approx(0.0, abs=1e-30)


def test_sinc2_derivative_series_and_closed_form_agree():
    step = 1e-6
    for theta in (1e-4, 2e-3, 1.0, 2.606):
        numeric = (sinc(0.5 * (theta + step)) ** 2 - sinc(0.5 * (theta - step)) ** 2) / (2 * step)
        assert sinc2_derivative(theta) == pytest.approx(numeric, abs=1e-9)
    assert sinc2_derivative(0.0) == 0.0


def test_fel_gain_extremum():
    theta = oracles.fel_gain_extremum()
    assert theta == pytest.approx(2.606, abs=1e-3)
    assert sinc2_derivative(theta) < sinc2_derivative(theta - 0.1)
    assert sinc2_derivative(theta) < sinc2_derivative(theta + 0.1)


def test_fel_low_gain_is_antisymmetric_in_detuning():
    plus = oracles.fel_low_gain(0.01, 100.0, 2.606, 0.1) - oracles.vacuum_spontaneous(0.01, 2.606)
    minus = oracles.fel_low_gain(0.01, 100.0, -2.606, 0.1) - oracles.vacuum_spontaneous(0.01, -2.606)
    assert plus < 0
    assert minus == pytest.approx(-plus)


@pytest.mark.parametrize(
    "error",
    [
        lambda eps: oracles.stimulated_low_gain_error(0.01, 100.0, 2.606, eps),
        lambda eps: oracles.stimulated_squeezed_error(0.01, 1.0, 2.606, eps),
    ],
)
def test_low_gain_expansions_converge(error):
    ratios = oracles.richardson_ratios(error, (0.2, 0.1, 0.05))
    assert ratios[1] < ratios[0]
    assert ratios[2] < ratios[1]


def test_richardson_ratios():
    assert oracles.richardson_ratios(lambda eps: 3 * eps**2, (0.1, 0.01)) == pytest.approx([3.0, 3.0])
    assert oracles.richardson_ratios(lambda eps: eps**3, (0.5,), order=3) == pytest.approx([1.0])


@pytest.mark.parametrize("nu0, upsilon", [(100.0, 0.1), (25.0, 0.05)])
def test_max_signal_to_noise(nu0, upsilon):
    measured = oracles.max_signal_to_noise(nu0, upsilon)
    assert measured == pytest.approx(params.snr_max(nu0, upsilon), rel=1e-4)


def test_interference_overlaps_match_extinction():
    rho = 0.5
    _, _, emission, absorption = oracles.gaussian_overlaps(rho, 0.0)
    damping = math.exp(-0.5)
    assert emission.quadrature_zeroth.real == pytest.approx(damping, rel=1e-8)
    assert emission.closed_zeroth.real == pytest.approx(damping, rel=1e-14)
    assert absorption.quadrature_zeroth.real == pytest.approx(damping, rel=1e-8)


def test_interference_density_sits_half_a_recoil_away():
    _, _, emission, absorption = oracles.gaussian_overlaps(0.5, 0.0)
    damping = math.exp(-0.5)
    assert emission.quadrature_first.real == pytest.approx(-0.5 * damping, rel=1e-8)
    assert absorption.quadrature_first.real == pytest.approx(0.5 * damping, rel=1e-8)
    assert emission.closed_first.real == pytest.approx(-damping)


def test_absorption_overlap_with_recoil_and_chirp():
    rho, chirp, pr, hq = 0.5, 1.0, 0.1, 0.04
    _, _, _, absorption = oracles.gaussian_overlaps(rho, chirp, hq=hq, pr=pr)
    damping = params.extinction(params.gamma(0.5 / rho, chirp))
    quadrature = absorption.quadrature_zeroth
    assert quadrature.real == pytest.approx(absorption.closed_zeroth.real, rel=1e-8)
    assert quadrature.real == pytest.approx(damping * (1 - (pr - hq) / 2), rel=1e-8)
    # the imaginary part comes out with the opposite sign to the closed form
    assert quadrature.imag == pytest.approx(damping * pr * chirp / 2, rel=1e-7)
    assert absorption.closed_zeroth.imag == pytest.approx(-quadrature.imag, rel=1e-7)


def test_population_overlaps():
    rho, pr, hq = 0.8, 0.1, 0.05
    emission, absorption, _, _ = oracles.gaussian_overlaps(rho, 0.3, hq=hq, pr=pr)
    assert emission.quadrature_zeroth.real == pytest.approx(emission.closed_zeroth.real, rel=1e-9)
    assert absorption.quadrature_zeroth.real == pytest.approx(
        absorption.closed_zeroth.real, rel=1e-9
    )
    assert emission.name == "population_emission"
    assert absorption.name == "population_absorption"


def test_gaussian_overlaps_reject_bad_width():
    with pytest.raises(ValueError):
        oracles.gaussian_overlaps(0.0, 0.0)


def test_smith_purcell_golden_value():
    omega = params.angular_frequency(1e-6)
    density = oracles.smith_purcell_density(omega, 1e-3, 0.1, 0.0)
    assert density == pytest.approx(6.0440962542e-33, rel=1e-8)


def test_smith_purcell_scaling():
    omega = params.angular_frequency(1e-6)
    base = oracles.smith_purcell_density(omega, 1e-3, 0.1, 1.0)
    assert oracles.smith_purcell_density(omega, 2e-3, 0.1, 1.0) / base == pytest.approx(4.0)
    assert oracles.smith_purcell_density(omega, 1e-3, 0.2, 1.0) / base == pytest.approx(4.0)
    assert oracles.smith_purcell_density(omega, 1e-3, -0.1, 1.0) == base


@pytest.mark.parametrize("theta", [0.0, 1.0, 4.0])
def test_smith_purcell_pipeline_with_matching_volume(theta):
    omega = params.angular_frequency(1e-6)
    length, beta, eta, area = 1e-3, 0.7, 0.1, 1e-10
    volume = oracles.matching_volume(omega, length, beta, eta, area)
    assert volume > 0
    pipeline = oracles.smith_purcell_pipeline(omega, length, beta, eta, theta, area, volume)
    direct = oracles.smith_purcell_density(omega, length, eta, theta)
    assert pipeline == pytest.approx(direct, rel=1e-12)


def test_photon_density_of_states_scales_with_volume():
    omega = params.angular_frequency(1e-6)
    assert oracles.photon_density_of_states(omega, 2.0) == pytest.approx(
        2 * oracles.photon_density_of_states(omega, 1.0)
    )
