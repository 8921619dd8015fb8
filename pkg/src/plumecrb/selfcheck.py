"""Built-in numerical validation: independent oracles for the core math.

Each check reports its maximum observed error against a tolerance.  Run via
``plumecrb validate`` or :func:`run_validation`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import binary, crb, harness
from .binary import NoiseModel
from .models import (
    ConstantModel,
    GaussianPlume,
    PlumeEnvironment,
    SensorLocation,
    finite_difference_gradient,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_error < self.tolerance


def _random_plume_configs(rng, n):
    """Random (theta, sensor) pairs inside the usable plume region.

    Keeps the sensor within a few plume widths of the centerline so the
    concentration is not lost to underflow, where a finite-difference
    reference is meaningless.
    """
    env = PlumeEnvironment()
    model = GaussianPlume(env)
    for _ in range(n):
        x0 = rng.uniform(0.0, 20.0)
        y0 = rng.uniform(-20.0, 40.0)
        dx = rng.uniform(10.0, 200.0)
        sigma_y = env.sigma_v * dx / env.U
        dy = rng.uniform(-2.5, 2.5) * sigma_y
        yield model, np.array([x0, y0]), SensorLocation(x0 + dx, y0 + dy)


def check_gradient_fd(n_configs: int = 100, step: float = 1e-4,
                      seed: int = 42) -> CheckResult:
    """Analytic gradients vs central finite differences, all models."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for model, theta, sensor in _random_plume_configs(rng, n_configs):
        g = model.gradient(theta, sensor)
        fd = finite_difference_gradient(model, theta, sensor, step)
        scale = max(np.max(np.abs(g)), np.max(np.abs(fd)), 1e-300)
        worst = max(worst, float(np.max(np.abs(g - fd)) / scale))
    from .models import RssModel
    rss = RssModel()
    for _ in range(n_configs):
        theta = np.array([rng.uniform(-20, 20), rng.uniform(-20, 20),
                          rng.uniform(0, 40)])
        sensor = SensorLocation(theta[0] + rng.uniform(5, 200),
                                theta[1] + rng.uniform(5, 200))
        g = rss.gradient(theta, sensor)
        fd = finite_difference_gradient(rss, theta, sensor, step)
        scale = max(np.max(np.abs(g)), np.max(np.abs(fd)))
        worst = max(worst, float(np.max(np.abs(g - fd)) / scale))
    const = ConstantModel()
    g = const.gradient([3.7], SensorLocation(0, 0))
    fd = finite_difference_gradient(const, [3.7], SensorLocation(0, 0), step)
    worst = max(worst, float(np.max(np.abs(g - fd))))
    return CheckResult("gradient_vs_finite_difference", worst, 1e-6)


def check_empirical_fim(seed: int = 7) -> CheckResult:
    """Exact score-outer-product enumeration vs the closed-form matrix."""
    noise = NoiseModel(1e-4)
    model = GaussianPlume(PlumeEnvironment())
    sensors = harness.grid_placement(
        harness.PlacementSpec((100, 160), (0, 10, 20, 30)))
    theta = np.array([10.0, 15.0])
    worst = 0.0
    for tau in (0.0018, 0.003):
        exact = crb.empirical_information_matrix(model, theta, sensors, noise,
                                                 tau, exact=True)
        analytic = crb.data_information_matrix(model, theta, sensors, noise,
                                               tau)
        scale = max(float(np.linalg.norm(analytic)), 1e-300)
        worst = max(worst, float(np.max(np.abs(exact - analytic)) / scale))
    const = ConstantModel()
    n1 = NoiseModel(1.0)
    s3 = [SensorLocation(0, 0)] * 3
    exact = crb.empirical_information_matrix(const, [0.3], s3, n1, 0.5,
                                             exact=True)
    expected = 3 * binary.rho(n1, 0.2)
    worst = max(worst, abs(float(exact[0, 0]) - expected) / expected)
    return CheckResult("empirical_fim_enumeration", worst, 1e-10)


def check_likelihood_normalization(seed: int = 11) -> CheckResult:
    """sum over all 2^S outcomes of the likelihood must be 1."""
    rng = np.random.default_rng(seed)
    model = GaussianPlume(PlumeEnvironment())
    noise = NoiseModel(1e-4)
    worst = 0.0
    for _ in range(3):
        sensors = [SensorLocation(rng.uniform(30, 240), rng.uniform(-40, 50))
                   for _ in range(8)]
        theta = np.array([rng.uniform(0, 20), rng.uniform(0, 30)])
        tau = rng.uniform(1e-4, 3e-3)
        total = 0.0
        for k in range(2 ** len(sensors)):
            b = (k >> np.arange(len(sensors))) & 1
            total += np.exp(binary.log_likelihood(b, model, theta, sensors,
                                                  noise, tau))
        worst = max(worst, abs(total - 1.0))
    return CheckResult("likelihood_normalization", worst, 1e-10)


def check_rho_properties() -> CheckResult:
    """rho peak value, symmetry, and the 1/sigma^2 analog ceiling."""
    worst = 0.0
    for sigma in (1.0, 1e-4, 3.7):
        noise = NoiseModel(sigma)
        peak = binary.rho(noise, 0.0)
        worst = max(worst, abs(peak * sigma ** 2 - 2.0 / np.pi))
        u = np.linspace(-8 * sigma, 8 * sigma, 2001)
        r = binary.rho(noise, u)
        worst = max(worst, float(np.max(np.abs(r - r[::-1]) * sigma ** 2)))
        if np.any(r >= 1.0 / sigma ** 2):
            worst = max(worst, 1.0)
    return CheckResult("rho_properties", worst, 1e-10)


def run_validation() -> list[CheckResult]:
    return [
        check_gradient_fd(),
        check_empirical_fim(),
        check_likelihood_normalization(),
        check_rho_properties(),
    ]


def format_report(results: list[CheckResult]) -> str:
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{status}  {r.name}: max error {r.max_error:.3e} "
                     f"(tolerance {r.tolerance:.0e})")
    return "\n".join(lines)
