"""Command-line interface.

Subcommands:

* ``crb``        -- posterior CRB and localization std for a scenario
* ``sweep``      -- threshold sweep, CSV output
* ``mcmc``       -- one simulated measurement + one MCMC localization
* ``montecarlo`` -- Monte Carlo RMS campaign, per-run CSV output
* ``benchmark``  -- bound-vs-RMS comparison over the three reference placements
* ``validate``   -- built-in numerical oracle suite

Exit codes: 0 success, 2 config error, 3 runtime failure, 4 validation failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import binary, crb, harness, mcmc, selfcheck
from .config import ConfigError, load_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_VALIDATION = 4


def _add_common(parser, config_required=True):
    parser.add_argument("--config", required=config_required,
                        help="scenario config file (flat key=value format)")
    parser.add_argument("--set", dest="overrides", action="append",
                        metavar="KEY=VALUE", default=[],
                        help="override a config key (repeatable)")
    parser.add_argument("--threads", type=int,
                        default=os.cpu_count() or 1,
                        help="worker thread cap for parallel runs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plumecrb",
        description="Posterior Cramer-Rao bounds and MCMC localization for "
                    "binary sensor networks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("crb", help="print the posterior CRB for a scenario")
    _add_common(p)

    p = sub.add_parser("sweep", help="threshold sweep to CSV")
    _add_common(p)
    p.add_argument("--tau-min", type=float, default=1e-6)
    p.add_argument("--tau-max", type=float, default=1e-1)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--output", required=True)

    p = sub.add_parser("mcmc", help="single simulated-measurement localization")
    _add_common(p)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("montecarlo", help="Monte Carlo RMS campaign to CSV")
    _add_common(p)
    p.add_argument("--runs", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)

    p = sub.add_parser("benchmark", help="bound vs RMS for the reference "
                                      "placements")
    _add_common(p, config_required=False)
    p.add_argument("--runs", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)

    p = sub.add_parser("validate", help="run the built-in oracle suite")
    return parser


def _fullprec(x) -> str:
    return repr(float(x))


def cmd_crb(args) -> int:
    scenario = load_scenario(args.config, args.overrides)
    jd = crb.data_information_matrix(scenario.model, scenario.theta_true,
                                     scenario.sensors, scenario.noise,
                                     scenario.tau)
    bound = crb.posterior_crb(jd, crb.prior_information(scenario.prior))
    sigma = crb.localization_sigma(bound)
    print(f"sigma_crb_loc = {_fullprec(sigma)} m")
    print("posterior CRB matrix (m^2):")
    for row in bound:
        print("  " + "  ".join(_fullprec(v) for v in row))
    return EXIT_OK


def cmd_sweep(args) -> int:
    if not (args.tau_min < args.tau_max):
        raise ConfigError("--tau-min must be strictly below --tau-max")
    if args.points < 2:
        raise ConfigError("--points must be at least 2")
    scenario = load_scenario(args.config, args.overrides)
    taus = np.logspace(np.log10(args.tau_min), np.log10(args.tau_max),
                       args.points)
    records = harness.threshold_sweep(scenario, taus)
    harness.write_sweep_csv(records, args.output)
    best = min(records, key=lambda r: r.sigma_crb_binary)
    print(f"wrote {len(records)} rows to {args.output}")
    print(f"best threshold {_fullprec(best.tau)} with sigma_crb_binary "
          f"{_fullprec(best.sigma_crb_binary)} m "
          f"(analog {_fullprec(best.sigma_crb_analog)} m, "
          f"prior {_fullprec(best.sigma_prior)} m)")
    return EXIT_OK


def cmd_mcmc(args) -> int:
    scenario = load_scenario(args.config, args.overrides)
    seed = args.seed
    b = binary.simulate(scenario.model, scenario.theta_true, scenario.sensors,
                        scenario.noise, scenario.tau, rng_seed=seed)
    config = mcmc.McmcConfig()
    start = mcmc.initialize(scenario, b, config,
                            rng=np.random.default_rng([seed, 1]))
    result = mcmc.run_chain(scenario, b, config, start,
                            rng=np.random.default_rng([seed, 2]))
    err = float(np.linalg.norm(result.estimate - scenario.theta_true))
    print(f"bits: {''.join(str(int(x)) for x in b)}")
    print(f"estimate = ({_fullprec(result.estimate[0])}, "
          f"{_fullprec(result.estimate[1])}) m")
    print(f"error = {_fullprec(err)} m, acceptance rate = "
          f"{result.acceptance_rate:.4f}")
    return EXIT_OK


def cmd_montecarlo(args) -> int:
    if args.runs < 1:
        raise ConfigError("--runs must be at least 1")
    scenario = load_scenario(args.config, args.overrides)
    config = mcmc.McmcConfig()
    rms, records = harness.monte_carlo_rms(scenario, config, args.runs,
                                           args.seed, threads=args.threads)
    harness.write_runs_csv(records, args.output)
    failed = sum(1 for r in records if r.failed)
    print(f"RMS localization error over {args.runs - failed} runs: "
          f"{_fullprec(rms)} m")
    if failed:
        print(f"warning: {failed} runs failed initialization and were "
              f"excluded", file=sys.stderr)
    print(f"theoretical sigma_crb_loc: "
          f"{_fullprec(harness.scenario_sigma_crb(scenario))} m")
    return EXIT_OK


def cmd_benchmark(args) -> int:
    rows = harness.benchmark_placements(args.seed, n_runs=args.runs,
                                    threads=args.threads)
    harness.write_benchmark_csv(rows, args.output)
    for row in rows:
        print(f"placement {row['placement']} (S={row['S']}): "
              f"sigma_crb {row['sigma_crb']:.4f} m, "
              f"RMS {row['rms_error']:.4f} m over {row['n_runs']} runs")
    return EXIT_OK


def cmd_validate(_args) -> int:
    results = selfcheck.run_validation()
    print(selfcheck.format_report(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION


COMMANDS = {
    "crb": cmd_crb,
    "sweep": cmd_sweep,
    "mcmc": cmd_mcmc,
    "montecarlo": cmd_montecarlo,
    "benchmark": cmd_benchmark,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
