"""Information matrices and the posterior bound."""

import numpy as np
import pytest

from plumecrb import binary, crb
from plumecrb.binary import NoiseModel
from plumecrb.crb import GaussianPrior
from plumecrb.models import (
    ConstantModel,
    GaussianPlume,
    PlumeEnvironment,
    SensorLocation,
)


@pytest.fixture
def setup():
    model = GaussianPlume(PlumeEnvironment())
    sensors = [SensorLocation(x, y) for x in (40, 70, 100) for y in (0, 20)]
    theta = np.array([10.0, 15.0])
    noise = NoiseModel(1e-4)
    prior = GaussianPrior(mean=theta, variances=np.array([500.0 ** 2] * 2))
    return model, theta, sensors, noise, prior


def test_data_information_symmetric_psd(setup):
    model, theta, sensors, noise, _ = setup
    for tau in (1e-5, 0.0018, 0.01):
        jd = crb.data_information_matrix(model, theta, sensors, noise, tau)
        np.testing.assert_array_equal(jd, jd.T)
        assert np.all(np.linalg.eigvalsh(jd) >= -1e-12 * np.linalg.norm(jd))


def test_quantization_never_adds_information(setup):
    model, theta, sensors, noise, _ = setup
    ja = crb.analog_information_matrix(model, theta, sensors, noise)
    for tau in (1e-5, 5e-4, 0.0018, 0.01):
        jd = crb.data_information_matrix(model, theta, sensors, noise, tau)
        gap = np.linalg.eigvalsh(ja - jd)
        assert np.all(gap >= -1e-9 * np.linalg.norm(ja))


def test_posterior_crb_is_the_inverse(setup):
    model, theta, sensors, noise, prior = setup
    jd = crb.data_information_matrix(model, theta, sensors, noise, 0.0018)
    jp = crb.prior_information(prior)
    bound = crb.posterior_crb(jd, jp)
    np.testing.assert_allclose((jd + jp) @ bound, np.eye(2), atol=1e-12)


def test_posterior_crb_reduces_to_prior_without_data(setup):
    _, _, _, _, prior = setup
    bound = crb.posterior_crb(np.zeros((2, 2)), crb.prior_information(prior))
    np.testing.assert_allclose(bound, prior.covariance(), rtol=1e-14)


def test_posterior_crb_never_exceeds_prior(setup):
    model, theta, sensors, noise, prior = setup
    jp = crb.prior_information(prior)
    for tau in (1e-5, 0.0018, 1e6):
        jd = crb.data_information_matrix(model, theta, sensors, noise, tau)
        bound = crb.posterior_crb(jd, jp)
        assert np.all(np.linalg.eigvalsh(prior.covariance() - bound) >= -1e-9)


def test_posterior_crb_singular_raises():
    with pytest.raises(np.linalg.LinAlgError):
        crb.posterior_crb(np.zeros((2, 2)), np.zeros((2, 2)))


def test_localization_sigma(setup):
    bound = np.diag([9.0, 16.0])
    assert crb.localization_sigma(bound) == 5.0
    with pytest.raises(ValueError):
        crb.localization_sigma(np.diag([-1.0, 0.0]))


def test_empirical_matches_analytic_exact(setup):
    model, theta, sensors, noise, _ = setup
    for tau in (0.0018, 0.003):
        exact = crb.empirical_information_matrix(model, theta, sensors, noise,
                                                 tau, exact=True)
        analytic = crb.data_information_matrix(model, theta, sensors, noise,
                                               tau)
        scale = np.linalg.norm(analytic)
        assert np.max(np.abs(exact - analytic)) < 1e-12 * scale


def test_empirical_constant_model_is_s_rho():
    const = ConstantModel()
    noise = NoiseModel(1.0)
    sensors = [SensorLocation(0, 0)] * 5
    exact = crb.empirical_information_matrix(const, [0.3], sensors, noise,
                                             0.5, exact=True)
    assert exact[0, 0] == pytest.approx(5 * binary.rho(noise, 0.2), rel=1e-12)


def test_empirical_sampling_mode_converges(setup):
    model, theta, sensors, noise, _ = setup
    tau = 0.0018
    sampled = crb.empirical_information_matrix(model, theta, sensors, noise,
                                               tau, n_samples=100_000,
                                               rng_seed=4, exact=False)
    analytic = crb.data_information_matrix(model, theta, sensors, noise, tau)
    scale = np.linalg.norm(analytic)
    assert np.max(np.abs(sampled - analytic)) < 0.05 * scale


def test_empirical_argument_validation(setup):
    model, theta, sensors, noise, _ = setup
    with pytest.raises(ValueError):
        crb.empirical_information_matrix(model, theta, sensors, noise, 0.0018,
                                         n_samples=100, exact=False)
    many = [SensorLocation(40 + i, 0) for i in range(21)]
    with pytest.raises(ValueError):
        crb.empirical_information_matrix(model, theta, many, noise, 0.0018,
                                         exact=True)


def test_gaussian_prior_validation():
    with pytest.raises(ValueError):
        GaussianPrior(mean=np.zeros(2), variances=np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        GaussianPrior(mean=np.zeros(3), variances=np.ones(2))
    prior = GaussianPrior(mean=np.array([1.0, 2.0]),
                          variances=np.array([4.0, 9.0]))
    ld = prior.log_density(np.array([[3.0, 2.0]]))
    assert ld[0] == pytest.approx(-0.5 * 4.0 / 4.0)
