"""Posterior Cramer-Rao bounds for source localization with binary sensors."""

from .binary import (
    NoiseModel,
    comp_cdf,
    detection_probability,
    gauss_pdf,
    log_likelihood,
    rho,
    score,
    simulate,
)
from .crb import (
    GaussianPrior,
    analog_information_matrix,
    data_information_matrix,
    empirical_information_matrix,
    localization_sigma,
    posterior_crb,
    prior_information,
)
from .harness import (
    PlacementSpec,
    RunRecord,
    Scenario,
    SweepRecord,
    default_scenario,
    grid_placement,
    monte_carlo_rms,
    benchmark_placements,
    reference_scenario,
    threshold_sweep,
)
from .mcmc import ChainResult, InitializationError, McmcConfig, initialize, run_chain
from .models import (
    ConstantModel,
    GaussianPlume,
    InvalidScenarioError,
    PlumeEnvironment,
    RssModel,
    SensorLocation,
    finite_difference_gradient,
)

__version__ = "0.1.0"
