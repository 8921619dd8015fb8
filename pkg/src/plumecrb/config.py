"""Flat key-value scenario configs.

Format: one ``key = value`` per line, ``#`` comments, dotted keys.  Sensor
grids come either from comma-separated ``sensors.x_coords`` /
``sensors.y_coords`` lists (Cartesian product) or from ``sensors.file``,
a CSV of x,y,z rows.

Example::

    source.x0 = 10
    source.y0 = 15
    source.z0 = 5
    source.Q0 = 5
    env.U = 3.5
    env.sigma_v = 0.5
    env.sigma_w = 0.2
    noise.sigma = 1e-4
    threshold.tau = 0.0018
    prior.std_x = 500
    prior.std_y = 500
    sensors.x_coords = 40,100,160,220
    sensors.y_coords = -20,0,20,40
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .binary import NoiseModel
from .crb import GaussianPrior
from .harness import PlacementSpec, Scenario, grid_placement
from .models import PlumeEnvironment, SensorLocation


class ConfigError(ValueError):
    """Malformed or incomplete scenario configuration."""


SCALAR_KEYS = (
    "source.x0", "source.y0", "source.z0", "source.Q0",
    "env.U", "env.sigma_v", "env.sigma_w",
    "noise.sigma", "threshold.tau", "prior.std_x", "prior.std_y",
)


def load_config(path) -> dict[str, str]:
    """Parse a flat config file into a key -> raw-string mapping."""
    cfg: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', "
                              f"got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        cfg[key] = value
    return cfg


def apply_overrides(cfg: dict[str, str], overrides) -> dict[str, str]:
    """Apply repeatable ``key=value`` CLI overrides on top of a config."""
    out = dict(cfg)
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, value = (part.strip() for part in item.split("=", 1))
        out[key] = value
    return out


def _get_float(cfg, key) -> float:
    if key not in cfg:
        raise ConfigError(f"missing required config key '{key}'")
    try:
        return float(cfg[key])
    except ValueError as exc:
        raise ConfigError(f"config key '{key}': {cfg[key]!r} is not "
                          f"a number") from exc


def _parse_list(cfg, key) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in cfg[key].split(",") if tok.strip())
    except ValueError as exc:
        raise ConfigError(f"config key '{key}': expected a comma-separated "
                          f"list of numbers, got {cfg[key]!r}") from exc


def _load_sensor_csv(path) -> list[SensorLocation]:
    sensors = []
    try:
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].strip().lower() in ("x", "#x"):
                    continue
                vals = [float(v) for v in row]
                if len(vals) == 2:
                    vals.append(0.0)
                if len(vals) != 3:
                    raise ConfigError(f"sensors.file {path}: expected x,y[,z] "
                                      f"rows, got {row}")
                sensors.append(SensorLocation(*vals))
    except OSError as exc:
        raise ConfigError(f"cannot read sensors.file {path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"sensors.file {path}: {exc}") from exc
    return sensors


def build_scenario(cfg: dict[str, str]) -> Scenario:
    """Validate a parsed config and assemble the Scenario."""
    vals = {key: _get_float(cfg, key) for key in SCALAR_KEYS}

    if "sensors.file" in cfg:
        sensors = _load_sensor_csv(cfg["sensors.file"])
    elif "sensors.x_coords" in cfg and "sensors.y_coords" in cfg:
        xs = _parse_list(cfg, "sensors.x_coords")
        ys = _parse_list(cfg, "sensors.y_coords")
        if not xs or not ys:
            key = "sensors.x_coords" if not xs else "sensors.y_coords"
            raise ConfigError(f"config key '{key}' lists no sensors")
        sensors = grid_placement(PlacementSpec(xs, ys))
    else:
        raise ConfigError("missing sensor definition: provide 'sensors.file' "
                          "or both 'sensors.x_coords' and 'sensors.y_coords'")
    if not sensors:
        raise ConfigError("sensor definition yields zero sensors")

    try:
        env = PlumeEnvironment(z0=vals["source.z0"], Q0=vals["source.Q0"],
                               U=vals["env.U"], sigma_v=vals["env.sigma_v"],
                               sigma_w=vals["env.sigma_w"])
        noise = NoiseModel(sigma=vals["noise.sigma"])
        theta = np.array([vals["source.x0"], vals["source.y0"]])
        prior = GaussianPrior(mean=theta,
                              variances=np.array([vals["prior.std_x"] ** 2,
                                                  vals["prior.std_y"] ** 2]))
        return Scenario(theta_true=theta, environment=env, noise=noise,
                        tau=vals["threshold.tau"], sensors=sensors,
                        prior=prior)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_scenario(path, overrides=None) -> Scenario:
    return build_scenario(apply_overrides(load_config(path), overrides))
