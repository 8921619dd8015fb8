"""Information matrices and the posterior Cramer-Rao bound.

The data information matrix for binary sensors is

    J^d_{mn} = sum_i rho(tau - C_i) * dC_i/dtheta_m * dC_i/dtheta_n,

its analog (unquantized) counterpart replaces rho by 1/sigma^2, and the
Gaussian prior contributes its inverse covariance.  The posterior CRB is
(J^d + J^p)^{-1}, evaluated at the true parameter vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import binary
from .binary import NoiseModel


@dataclass(frozen=True)
class GaussianPrior:
    """Independent Gaussian prior on each parameter component."""

    mean: np.ndarray
    variances: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=float))
        object.__setattr__(self, "variances",
                           np.asarray(self.variances, dtype=float))
        if self.mean.shape != self.variances.shape or self.mean.ndim != 1:
            raise ValueError("prior mean and variances must be 1-d and "
                             "matched in length")
        if not np.all(self.variances > 0):
            raise ValueError("prior variances must be positive")

    @property
    def dim(self) -> int:
        return self.mean.size

    def covariance(self) -> np.ndarray:
        return np.diag(self.variances)

    def log_density(self, thetas: np.ndarray) -> np.ndarray:
        """Unnormalized log prior density, vectorized over rows of thetas."""
        d = np.atleast_2d(thetas) - self.mean
        return -0.5 * np.sum(d ** 2 / self.variances, axis=1)


def data_information_matrix(model, theta, sensors, noise: NoiseModel,
                            tau: float) -> np.ndarray:
    """Fisher information of the binary measurements at theta."""
    c = model.concentrations(theta, sensors)
    grads = model.gradients(theta, sensors)
    w = binary.rho(noise, tau - c)
    # upwind/zero-gradient sensors contribute nothing regardless of w
    j = (grads * w[:, None]).T @ grads
    return 0.5 * (j + j.T)


def analog_information_matrix(model, theta, sensors,
                              noise: NoiseModel) -> np.ndarray:
    """Fisher information if the raw (unquantized) readings were reported."""
    grads = model.gradients(theta, sensors)
    j = grads.T @ grads / noise.sigma ** 2
    return 0.5 * (j + j.T)


def prior_information(prior: GaussianPrior) -> np.ndarray:
    return np.diag(1.0 / prior.variances)


def posterior_crb(jd: np.ndarray, jp: np.ndarray) -> np.ndarray:
    """(J^d + J^p)^{-1}; closed-form for 2x2, Cholesky otherwise."""
    a = np.asarray(jd, dtype=float) + np.asarray(jp, dtype=float)
    if a.shape[0] == 2:
        det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
        if not np.isfinite(det) or det <= 0:
            raise np.linalg.LinAlgError("information matrix sum is singular")
        inv = np.array([[a[1, 1], -a[0, 1]], [-a[1, 0], a[0, 0]]]) / det
    else:
        try:
            cf = scipy.linalg.cho_factor(a)
        except scipy.linalg.LinAlgError as exc:
            raise np.linalg.LinAlgError(
                "information matrix sum is singular") from exc
        inv = scipy.linalg.cho_solve(cf, np.eye(a.shape[0]))
    return 0.5 * (inv + inv.T)


def localization_sigma(crb: np.ndarray) -> float:
    """Best achievable localization error std: sqrt(trace of the bound)."""
    tr = float(np.trace(crb))
    if tr < 0:
        raise ValueError("covariance bound has negative trace")
    return float(np.sqrt(tr))


def _score_coefficients(model, theta, sensors, noise, tau):
    c = model.concentrations(theta, sensors)
    t = (tau - c) / noise.sigma
    s_one = binary._std_hazard(t) / noise.sigma
    s_zero = -binary._std_hazard(-t) / noise.sigma
    # true (unclamped) tail log-probabilities; -1e9 stands in for log 0 so
    # that 0 * log(0) products vanish instead of producing NaN
    logq = np.maximum(binary._std_log_tail(t), -1e9)
    log1mq = np.maximum(binary._std_log_tail(-t), -1e9)
    return s_one, s_zero, logq, log1mq


def empirical_information_matrix(model, theta_true, sensors,
                                 noise: NoiseModel, tau: float,
                                 n_samples: int = 100_000,
                                 rng_seed=0,
                                 exact: bool | None = None) -> np.ndarray:
    """Monte Carlo / exact-enumeration oracle for the data information matrix.

    Averages score(b) score(b)^T over the measurement distribution at the
    true parameter.  With exact=True (the default for S <= 10) the average
    is an exact sum over all 2^S outcomes; otherwise n_samples draws are
    used (n_samples >= 10^4 required).
    """
    s = len(sensors)
    if exact is None:
        exact = s <= 10
    s_one, s_zero, logq, log1mq = _score_coefficients(model, theta_true,
                                                      sensors, noise, tau)
    grads = model.gradients(theta_true, sensors)
    if exact:
        if s > 20:
            raise ValueError("exact enumeration limited to S <= 20")
        bits = (np.arange(2 ** s)[:, None] >> np.arange(s)) & 1
        p = np.exp(bits @ logq + (1 - bits) @ log1mq)
        coef = bits * s_one + (1 - bits) * s_zero
        scores = coef @ grads
        j = (scores * p[:, None]).T @ scores
    else:
        if n_samples < 10_000:
            raise ValueError("sampling mode requires n_samples >= 10^4")
        rng = np.random.default_rng(rng_seed)
        q = np.exp(logq)
        bits = (rng.random((n_samples, s)) < q).astype(float)
        coef = bits * s_one + (1.0 - bits) * s_zero
        scores = coef @ grads
        j = scores.T @ scores / n_samples
    return 0.5 * (j + j.T)
