"""Forward signal models C_i(theta) and their analytic gradients.

Three models are provided:

* ``GaussianPlume`` -- steady-state atmospheric dispersion downwind of a
  continuous point release; unknowns are the source coordinates (x0, y0).
* ``RssModel`` -- received-signal-strength log-distance path loss;
  unknowns are (x0, y0, Q0).
* ``ConstantModel`` -- the degenerate C(theta) = theta case (M = 1).

All models expose scalar ``concentration`` / ``gradient`` plus vectorized
``concentrations`` / ``gradients`` over a sensor list, and a
``concentration_batch`` used by the MCMC code to evaluate many candidate
parameter vectors at once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LN10 = float(np.log(10.0))


class InvalidScenarioError(ValueError):
    """A model evaluation produced a non-finite value or hit a singularity."""


@dataclass(frozen=True)
class PlumeEnvironment:
    """Fixed (known) environmental parameters of the Gaussian plume."""

    z0: float = 5.0       # source height, m
    Q0: float = 5.0       # release rate, g/s
    U: float = 3.5        # mean wind speed, m/s
    sigma_v: float = 0.5  # crosswind spread rate, m/s
    sigma_w: float = 0.2  # vertical spread rate, m/s

    def __post_init__(self):
        if not (self.U > 0 and self.Q0 > 0 and self.sigma_v > 0
                and self.sigma_w > 0 and self.z0 >= 0):
            raise ValueError("invalid plume environment: need U, Q0, sigma_v, "
                             "sigma_w > 0 and z0 >= 0")


@dataclass(frozen=True)
class SensorLocation:
    x: float
    y: float
    z: float = 0.0

    def __post_init__(self):
        if not np.all(np.isfinite([self.x, self.y, self.z])):
            raise ValueError("sensor coordinates must be finite")


def sensor_array(sensors) -> np.ndarray:
    """Stack a sequence of SensorLocation into an (S, 3) float array."""
    arr = np.array([[s.x, s.y, s.z] for s in sensors], dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise ValueError("need at least one sensor")
    return arr


def _as_theta(theta, dim: int) -> np.ndarray:
    t = np.asarray(theta, dtype=float).reshape(-1)
    if t.size != dim:
        raise ValueError(f"expected parameter vector of length {dim}, got {t.size}")
    if not np.all(np.isfinite(t)):
        raise ValueError("parameter vector must be finite")
    return t


class GaussianPlume:
    """Ground-level concentration of a continuous release advected along +x.

    The plume exists only downwind: sensors at x <= x0 read exactly zero
    concentration (and zero gradient).
    """

    dim = 2  # theta = [x0, y0]

    def __init__(self, env: PlumeEnvironment):
        self.env = env

    def _spreads(self, dx):
        # plume widths grow linearly with downwind distance
        sy = self.env.sigma_v * dx / self.env.U
        sz = self.env.sigma_w * dx / self.env.U
        return sy, sz

    def concentration_batch(self, thetas: np.ndarray, xs: np.ndarray,
                            ys: np.ndarray) -> np.ndarray:
        """Concentrations for (L, 2) parameter vectors at S sensors -> (L, S)."""
        x0 = thetas[:, 0][:, None]
        y0 = thetas[:, 1][:, None]
        dx = xs[None, :] - x0
        down = dx > 0
        dxs = np.where(down, dx, 1.0)
        sy, sz = self._spreads(dxs)
        dy = ys[None, :] - y0
        env = self.env
        expo = np.exp(-env.z0 ** 2 / (2.0 * sz ** 2) - dy ** 2 / (2.0 * sy ** 2))
        c = env.Q0 / (np.pi * sy * sz * env.U) * expo
        return np.where(down, c, 0.0)

    def concentrations(self, theta, sensors) -> np.ndarray:
        t = _as_theta(theta, self.dim)
        arr = sensor_array(sensors)
        c = self.concentration_batch(t[None, :], arr[:, 0], arr[:, 1])[0]
        if not np.all(np.isfinite(c)):
            raise InvalidScenarioError("plume concentration overflowed "
                                       "(sensor too close to the source line?)")
        return c

    def concentration(self, theta, sensor: SensorLocation) -> float:
        return float(self.concentrations(theta, [sensor])[0])

    def gradients(self, theta, sensors) -> np.ndarray:
        """Per-sensor partials [dC/dx0, dC/dy0] -> (S, 2)."""
        t = _as_theta(theta, self.dim)
        arr = sensor_array(sensors)
        env = self.env
        dx = arr[:, 0] - t[0]
        down = dx > 0
        dxs = np.where(down, dx, 1.0)
        sy, sz = self._spreads(dxs)
        dy = arr[:, 1] - t[1]
        expo = np.exp(-env.z0 ** 2 / (2.0 * sz ** 2) - dy ** 2 / (2.0 * sy ** 2))
        c = env.Q0 / (np.pi * sy * sz * env.U) * expo
        alpha = env.Q0 * env.sigma_w * expo / (np.pi * env.U ** 2 * sy * sz ** 2)
        beta = env.Q0 * env.sigma_v * expo / (np.pi * env.U ** 2 * sy ** 2 * sz)
        gamma = c * (-dy ** 2 * env.sigma_v / (env.U * sy ** 3)
                     - env.z0 ** 2 * env.sigma_w / (env.U * sz ** 3))
        d_x0 = alpha + beta + gamma
        d_y0 = env.Q0 * dy * expo / (np.pi * env.U * sy ** 3 * sz)
        grads = np.column_stack([d_x0, d_y0])
        grads[~down] = 0.0
        if not np.all(np.isfinite(grads)):
            raise InvalidScenarioError("plume gradient overflowed")
        return grads

    def gradient(self, theta, sensor: SensorLocation) -> np.ndarray:
        return self.gradients(theta, [sensor])[0]


class RssModel:
    """Received signal strength with log-distance path loss (base-10 log).

    theta = [x0, y0, Q0]; d0 is a fixed reference distance.
    """

    dim = 3

    def __init__(self, d0: float = 1.0):
        if d0 <= 0:
            raise ValueError("d0 must be positive")
        self.d0 = d0

    def concentration_batch(self, thetas, xs, ys):
        dx = xs[None, :] - thetas[:, 0][:, None]
        dy = ys[None, :] - thetas[:, 1][:, None]
        d = np.hypot(dx, dy)
        if np.any(d == 0.0):
            raise InvalidScenarioError("RSS model is singular at zero "
                                       "sensor-source distance")
        return thetas[:, 2][:, None] - 20.0 * np.log10(d / self.d0)

    def concentrations(self, theta, sensors):
        t = _as_theta(theta, self.dim)
        arr = sensor_array(sensors)
        return self.concentration_batch(t[None, :], arr[:, 0], arr[:, 1])[0]

    def concentration(self, theta, sensor):
        return float(self.concentrations(theta, [sensor])[0])

    def gradients(self, theta, sensors):
        t = _as_theta(theta, self.dim)
        arr = sensor_array(sensors)
        dx = arr[:, 0] - t[0]
        dy = arr[:, 1] - t[1]
        d2 = dx ** 2 + dy ** 2
        if np.any(d2 == 0.0):
            raise InvalidScenarioError("RSS model is singular at zero "
                                       "sensor-source distance")
        g = 20.0 / LN10
        return np.column_stack([g * dx / d2, g * dy / d2, np.ones_like(dx)])

    def gradient(self, theta, sensor):
        return self.gradients(theta, [sensor])[0]


class ConstantModel:
    """C(theta) = theta; the one-parameter common-mean special case."""

    dim = 1

    def concentration_batch(self, thetas, xs, ys):
        return np.broadcast_to(thetas[:, 0][:, None],
                               (thetas.shape[0], xs.shape[0])).copy()

    def concentrations(self, theta, sensors):
        t = _as_theta(theta, self.dim)
        return np.full(len(sensors), t[0])

    def concentration(self, theta, sensor):
        return float(_as_theta(theta, self.dim)[0])

    def gradients(self, theta, sensors):
        _as_theta(theta, self.dim)
        return np.ones((len(sensors), 1))

    def gradient(self, theta, sensor):
        return self.gradients(theta, [sensor])[0]


def finite_difference_gradient(model, theta, sensor: SensorLocation,
                               step: float = 1e-4) -> np.ndarray:
    """Central-difference gradient of model.concentration, the test oracle.

    Refuses to straddle the plume's upwind boundary: the perturbed x0 must
    stay on the same side of the sensor as theta itself.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    t = _as_theta(theta, model.dim)
    if isinstance(model, GaussianPlume) and abs(sensor.x - t[0]) <= step:
        raise ValueError("finite-difference step crosses the x_i = x0 "
                         "plume boundary")
    grad = np.empty(model.dim)
    for m in range(model.dim):
        hi = t.copy()
        lo = t.copy()
        hi[m] += step
        lo[m] -= step
        grad[m] = (model.concentration(hi, sensor)
                   - model.concentration(lo, sensor)) / (2.0 * step)
    return grad
