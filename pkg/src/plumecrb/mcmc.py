"""Metropolis-Hastings source localization from binary measurements.

The chain targets likelihood * prior with a symmetric Gaussian random-walk
proposal whose covariance defaults to the theoretical posterior CRB of the
scenario.  Initialization draws candidates from the prior until enough of
them are consistent with the observed bits, then starts from the best one.

All randomness is owned by per-call generators derived from explicit seeds,
so results are bitwise reproducible.  Internally the chain update is
vectorized so that many independent chains (Monte Carlo runs) can be stepped
in lockstep; a single chain is just the L = 1 case, which keeps the two code
paths bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import binary, crb

# a candidate is "consistent with the data" if its likelihood is within this
# factor of the perfect-prediction ceiling (likelihood 1)
INIT_LIKELIHOOD_FLOOR = float(np.log(1e-30))


class InitializationError(RuntimeError):
    """No prior draw consistent with the data was found within the budget."""


@dataclass
class McmcConfig:
    n_s: int = 10              # consistent prior draws collected before start
    n_m: int = 10_000          # tail samples averaged into the estimate
    n_total: int | None = None  # chain length; defaults to 2 * n_m
    proposal_cov: np.ndarray | None = None  # defaults to the posterior CRB
    rng_seed: int = 0
    init_draw_budget: int = 1_000_000

    def __post_init__(self):
        if self.n_total is None:
            self.n_total = 2 * self.n_m
        if self.n_s < 1 or self.n_m < 1 or self.n_total < self.n_m:
            raise ValueError("need n_s >= 1 and n_total >= n_m >= 1")


@dataclass
class ChainResult:
    estimate: np.ndarray
    samples_kept: int
    acceptance_rate: float


def log_posterior(scenario, b_rows: np.ndarray,
                  thetas: np.ndarray) -> np.ndarray:
    """Unnormalized log posterior for (L, M) thetas with per-row bits (L, S)."""
    model = scenario.model
    sens = scenario.sensor_coords
    c = model.concentration_batch(thetas, sens[:, 0], sens[:, 1])
    t = (scenario.tau - c) / scenario.noise.sigma
    logq = np.maximum(binary._std_log_tail(t), binary.LOG_PROB_EPS)
    log1mq = np.maximum(binary._std_log_tail(-t), binary.LOG_PROB_EPS)
    ll = np.sum(b_rows * logq + (1.0 - b_rows) * log1mq, axis=1)
    return ll + scenario.prior.log_density(thetas)


def initialize(scenario, b, config: McmcConfig, rng=None) -> np.ndarray:
    """Pick the MCMC starting point from data-consistent prior draws."""
    if rng is None:
        rng = np.random.default_rng(config.rng_seed)
    prior = scenario.prior
    b_row = np.asarray(b, dtype=float)[None, :]
    std = np.sqrt(prior.variances)
    best_theta = None
    best_ll = -np.inf
    found = 0
    drawn = 0
    batch = 20_000
    while drawn < config.init_draw_budget:
        n = min(batch, config.init_draw_budget - drawn)
        cand = prior.mean + std * rng.standard_normal((n, prior.dim))
        drawn += n
        ll = log_posterior(scenario, b_row, cand) \
            - prior.log_density(cand)  # likelihood only
        ok = np.flatnonzero(ll > INIT_LIKELIHOOD_FLOOR)
        for idx in ok:
            if ll[idx] > best_ll:
                best_ll = float(ll[idx])
                best_theta = cand[idx].copy()
            found += 1
            if found >= config.n_s:
                return best_theta
    raise InitializationError(
        f"found only {found}/{config.n_s} data-consistent prior draws "
        f"within {config.init_draw_budget} attempts")


def _proposal_cholesky(cov: np.ndarray) -> np.ndarray:
    cov = np.asarray(cov, dtype=float)
    if not np.any(cov):
        return np.zeros_like(cov)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        # PSD but rank-deficient: fall back to a clipped eigen square root
        w, v = np.linalg.eigh(0.5 * (cov + cov.T))
        return v * np.sqrt(np.clip(w, 0.0, None))


def default_proposal_cov(scenario) -> np.ndarray:
    """Theoretical posterior CRB at the true source; prior-scale fallback."""
    try:
        jd = crb.data_information_matrix(scenario.model, scenario.theta_true,
                                         scenario.sensors, scenario.noise,
                                         scenario.tau)
        return crb.posterior_crb(jd, crb.prior_information(scenario.prior))
    except (np.linalg.LinAlgError, ValueError):
        return 0.01 * scenario.prior.covariance()


def run_chains(scenario, b_rows: np.ndarray, starts: np.ndarray,
               config: McmcConfig, rngs) -> list[ChainResult]:
    """Step L independent chains in lockstep; rngs[l] owns chain l's draws.

    Each chain consumes its generator in a fixed order (all proposal normals,
    then all acceptance uniforms), so results do not depend on how runs are
    grouped into batches.
    """
    b_rows = np.asarray(b_rows, dtype=float)
    starts = np.atleast_2d(np.asarray(starts, dtype=float))
    n_chains, m = starts.shape
    n_total, n_m = config.n_total, config.n_m
    cov = config.proposal_cov
    if cov is None:
        cov = default_proposal_cov(scenario)
    chol = _proposal_cholesky(cov)

    steps = np.empty((n_chains, n_total, m))
    log_u = np.empty((n_chains, n_total))
    for i, rng in enumerate(rngs):
        steps[i] = rng.standard_normal((n_total, m)) @ chol.T
        log_u[i] = np.log(rng.random(n_total))

    cur = starts.copy()
    cur_lp = log_posterior(scenario, b_rows, cur)
    accepts = np.zeros(n_chains, dtype=np.int64)
    tail_sum = np.zeros((n_chains, m))
    tail_start = n_total - n_m
    for t in range(n_total):
        prop = cur + steps[:, t, :]
        prop_lp = log_posterior(scenario, b_rows, prop)
        acc = log_u[:, t] < prop_lp - cur_lp
        cur = np.where(acc[:, None], prop, cur)
        cur_lp = np.where(acc, prop_lp, cur_lp)
        accepts += acc
        if t >= tail_start:
            tail_sum += cur
    estimates = tail_sum / n_m
    return [ChainResult(estimate=estimates[i], samples_kept=n_m,
                        acceptance_rate=float(accepts[i]) / n_total)
            for i in range(n_chains)]


def run_chain(scenario, b, config: McmcConfig, start,
              rng=None) -> ChainResult:
    """Run a single Metropolis-Hastings chain and average its tail."""
    if rng is None:
        rng = np.random.default_rng(config.rng_seed)
    b_rows = np.asarray(b, dtype=float)[None, :]
    return run_chains(scenario, b_rows, np.asarray(start, dtype=float)[None, :],
                      config, [rng])[0]
