"""Binary (thresholded) observation model.

A sensor's analog reading is C_i(theta) plus zero-mean Gaussian noise; the
reported bit is 1 iff the reading strictly exceeds the threshold tau.  The
probability of a 1 is the Gaussian upper-tail F(tau - C_i(theta)).

All tail quantities are computed through erfc/erfcx so that probabilities,
log-probabilities and the information weight rho stay accurate far into the
tails, where naive 1 - cdf arithmetic loses everything.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, erfcx

SQRT2 = float(np.sqrt(2.0))
SQRT_2PI = float(np.sqrt(2.0 * np.pi))
SQRT_2_OVER_PI = float(np.sqrt(2.0 / np.pi))

# Detection probabilities are clamped to [PROB_EPS, 1 - PROB_EPS] before
# taking logs, so far-field sensors cannot drive the log-likelihood to -inf.
PROB_EPS = 1e-300
LOG_PROB_EPS = float(np.log(PROB_EPS))


@dataclass(frozen=True)
class NoiseModel:
    """Additive white zero-mean Gaussian sensor noise."""

    sigma: float

    def __post_init__(self):
        if not (self.sigma > 0 and np.isfinite(self.sigma)):
            raise ValueError("noise sigma must be positive and finite")


def gauss_pdf(noise: NoiseModel, x):
    """Zero-mean Gaussian density with standard deviation noise.sigma."""
    x = np.asarray(x, dtype=float)
    s = noise.sigma
    out = np.exp(-x ** 2 / (2.0 * s ** 2)) / (SQRT_2PI * s)
    return out if out.ndim else float(out)


def comp_cdf(noise: NoiseModel, x):
    """Upper-tail probability F(x) = P(w > x), via erfc for tail accuracy."""
    x = np.asarray(x, dtype=float)
    out = 0.5 * erfc(x / (noise.sigma * SQRT2))
    return out if out.ndim else float(out)


def _std_log_tail(t):
    """log Q(t) for the standard normal upper tail, stable for any t."""
    t = np.asarray(t, dtype=float)
    shape = t.shape
    t = np.atleast_1d(t)
    out = np.empty_like(t)
    pos = t >= 0
    tp = t[pos]
    out[pos] = np.log(0.5 * erfcx(tp / SQRT2)) - 0.5 * tp ** 2
    tn = t[~pos]
    out[~pos] = np.log1p(-0.5 * erfc(-tn / SQRT2))
    return out.reshape(shape)


def _std_hazard(t):
    """phi(t) / Q(t) for the standard normal, stable for any t.

    Underflows cleanly to 0 as t -> -inf and grows like t as t -> +inf.
    """
    t = np.asarray(t, dtype=float)
    shape = t.shape
    t = np.atleast_1d(t)
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = SQRT_2_OVER_PI / erfcx(t[pos] / SQRT2)
    tn = t[~pos]
    phi = np.exp(-0.5 * tn ** 2) / SQRT_2PI
    out[~pos] = phi / (0.5 * erfc(tn / SQRT2))
    return out.reshape(shape)


def log_comp_cdf(noise: NoiseModel, x):
    """log F(x), stable deep into both tails."""
    x = np.asarray(x, dtype=float)
    out = _std_log_tail(x / noise.sigma)
    return out if out.ndim else float(out)


def detection_probabilities(model, theta, sensors, noise: NoiseModel,
                            tau: float) -> np.ndarray:
    """Per-sensor q_i = F(tau - C_i(theta)), clamped away from exact 0/1."""
    c = model.concentrations(theta, sensors)
    q = comp_cdf(noise, tau - c)
    return np.clip(q, PROB_EPS, 1.0 - PROB_EPS)


def detection_probability(model, theta, sensor, noise: NoiseModel,
                          tau: float) -> float:
    return float(detection_probabilities(model, theta, [sensor], noise, tau)[0])


def simulate(model, theta_true, sensors, noise: NoiseModel, tau: float,
             rng_seed) -> np.ndarray:
    """Draw one binary measurement vector; identical seed, identical bits.

    Ties z_i == tau map to bit 0.
    """
    rng = np.random.default_rng(rng_seed)
    c = model.concentrations(theta_true, sensors)
    z = c + noise.sigma * rng.standard_normal(c.shape[0])
    return (z > tau).astype(np.int64)


def _check_bits(b, n_sensors: int) -> np.ndarray:
    b = np.asarray(b)
    if b.shape != (n_sensors,):
        raise ValueError(f"measurement vector length {b.shape} does not match "
                         f"{n_sensors} sensors")
    if not np.all((b == 0) | (b == 1)):
        raise ValueError("measurements must be 0/1 bits")
    return b.astype(float)


def log_bit_probabilities(model, theta, sensors, noise: NoiseModel, tau):
    """(log q_i, log(1 - q_i)) per sensor, each floored at log(PROB_EPS)."""
    c = model.concentrations(theta, sensors)
    t = (tau - c) / noise.sigma
    logq = np.maximum(_std_log_tail(t), LOG_PROB_EPS)
    log1mq = np.maximum(_std_log_tail(-t), LOG_PROB_EPS)
    return logq, log1mq


def log_likelihood(b, model, theta, sensors, noise: NoiseModel,
                   tau: float) -> float:
    """Bernoulli log-likelihood of the bit vector b under theta."""
    bf = _check_bits(b, len(sensors))
    logq, log1mq = log_bit_probabilities(model, theta, sensors, noise, tau)
    return float(np.sum(bf * logq + (1.0 - bf) * log1mq))


def score(b, model, theta, sensors, noise: NoiseModel, tau: float) -> np.ndarray:
    """Gradient of log_likelihood with respect to theta."""
    bf = _check_bits(b, len(sensors))
    c = model.concentrations(theta, sensors)
    t = (tau - c) / noise.sigma
    # q_i rises with C_i, so a 1-bit pulls theta toward higher concentration
    # (weight +f/F at t) and a 0-bit pushes it down (weight -f/(1-F))
    coef = np.where(bf == 1.0, _std_hazard(t), -_std_hazard(-t)) / noise.sigma
    grads = model.gradients(theta, sensors)
    return coef @ grads


def rho(noise: NoiseModel, u):
    """Information weight f(u)^2 / (F(u)(1 - F(u))).

    This is what replaces the analog weight 1/sigma^2 once measurements are
    quantized to one bit.  Vanishes in both tails (underflow returns the
    exact limit 0 rather than NaN).
    """
    u = np.asarray(u, dtype=float)
    t = u / noise.sigma
    out = _std_hazard(t) * _std_hazard(-t) / noise.sigma ** 2
    return out if out.ndim else float(out)
