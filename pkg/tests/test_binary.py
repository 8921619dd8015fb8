"""Binary observation model: tail probabilities, likelihood, score, rho."""

import numpy as np
import pytest

from plumecrb import binary
from plumecrb.binary import NoiseModel
from plumecrb.models import GaussianPlume, PlumeEnvironment, SensorLocation


@pytest.fixture
def plume_setup():
    model = GaussianPlume(PlumeEnvironment())
    sensors = [SensorLocation(40, 0), SensorLocation(100, 20),
               SensorLocation(160, 10), SensorLocation(220, 40)]
    theta = np.array([10.0, 15.0])
    noise = NoiseModel(1e-4)
    return model, theta, sensors, noise


def test_comp_cdf_basics():
    noise = NoiseModel(2.0)
    assert binary.comp_cdf(noise, 0.0) == pytest.approx(0.5, abs=1e-15)
    xs = np.linspace(-10, 10, 41)
    total = binary.comp_cdf(noise, xs) + binary.comp_cdf(noise, -xs)
    np.testing.assert_allclose(total, 1.0, atol=1e-15)


def test_log_comp_cdf_matches_log_in_moderate_range():
    noise = NoiseModel(1.5)
    xs = np.linspace(-8, 8, 33)
    np.testing.assert_allclose(binary.log_comp_cdf(noise, xs),
                               np.log(binary.comp_cdf(noise, xs)),
                               rtol=1e-12, atol=1e-15)


def test_log_comp_cdf_is_finite_deep_in_the_tail():
    noise = NoiseModel(1.0)
    val = binary.log_comp_cdf(noise, 50.0)
    assert np.isfinite(val)
    # leading-order Mills ratio: log Q(t) ~ -t^2/2 - log(t sqrt(2 pi))
    assert val == pytest.approx(-0.5 * 50.0 ** 2 - np.log(50.0 * binary.SQRT_2PI),
                                rel=1e-3)


def test_simulate_is_seed_deterministic(plume_setup):
    model, theta, sensors, noise = plume_setup
    b1 = binary.simulate(model, theta, sensors, noise, 0.0018, rng_seed=123)
    b2 = binary.simulate(model, theta, sensors, noise, 0.0018, rng_seed=123)
    np.testing.assert_array_equal(b1, b2)
    assert set(np.unique(b1)) <= {0, 1}
    assert b1.shape == (len(sensors),)


def test_detection_probability_limits(plume_setup):
    model, theta, sensors, noise = plume_setup
    q_low = binary.detection_probabilities(model, theta, sensors, noise,
                                           tau=-1.0)
    q_high = binary.detection_probabilities(model, theta, sensors, noise,
                                            tau=1.0)
    # threshold far below every reading: always detected; far above: never
    np.testing.assert_allclose(q_low, 1.0 - binary.PROB_EPS)
    np.testing.assert_allclose(q_high, binary.PROB_EPS)


def test_log_likelihood_sums_bitwise_terms(plume_setup):
    model, theta, sensors, noise = plume_setup
    tau = 0.0018
    logq, log1mq = binary.log_bit_probabilities(model, theta, sensors, noise,
                                                tau)
    b = np.array([1, 0, 1, 0])
    expected = logq[0] + log1mq[1] + logq[2] + log1mq[3]
    assert binary.log_likelihood(b, model, theta, sensors, noise, tau) == \
        pytest.approx(expected, rel=1e-14)


def test_score_matches_finite_difference_of_log_likelihood(plume_setup):
    model, theta, sensors, noise = plume_setup
    tau = 1e-5
    b = binary.simulate(model, theta, sensors, noise, tau, rng_seed=9)
    s = binary.score(b, model, theta, sensors, noise, tau)
    step = 1e-6
    for m in range(2):
        hi, lo = theta.copy(), theta.copy()
        hi[m] += step
        lo[m] -= step
        fd = (binary.log_likelihood(b, model, hi, sensors, noise, tau)
              - binary.log_likelihood(b, model, lo, sensors, noise, tau)) \
            / (2 * step)
        assert s[m] == pytest.approx(fd, rel=1e-5, abs=1e-12)


def test_bit_validation(plume_setup):
    model, theta, sensors, noise = plume_setup
    with pytest.raises(ValueError):
        binary.log_likelihood([1, 0], model, theta, sensors, noise, 0.0018)
    with pytest.raises(ValueError):
        binary.log_likelihood([1, 0, 2, 0], model, theta, sensors, noise,
                              0.0018)


def test_rho_peak_symmetry_and_tails():
    for sigma in (1.0, 1e-4):
        noise = NoiseModel(sigma)
        assert binary.rho(noise, 0.0) * sigma ** 2 == \
            pytest.approx(2.0 / np.pi, abs=1e-12)
        u = np.linspace(-6 * sigma, 6 * sigma, 501)
        r = binary.rho(noise, u)
        np.testing.assert_allclose(r, r[::-1], rtol=1e-12)
        assert np.all(r < 1.0 / sigma ** 2)
        assert binary.rho(noise, 10 * sigma) < 1e-15 / sigma ** 2
        # deep tails underflow to the exact limit, not NaN
        assert binary.rho(noise, 1e6 * sigma) == 0.0


def test_noise_model_validation():
    with pytest.raises(ValueError):
        NoiseModel(0.0)
    with pytest.raises(ValueError):
        NoiseModel(-1.0)
