__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import FlowStallError

__all__ = ['Trajectory', 'rk4', 'flow']

logger = logging.getLogger(__name__)


@dataclass
class Trajectory:
    """Time grid and points, points shaped (len(times), m, n) for m starting points"""
    times: np.ndarray
    points: np.ndarray

    @property
    def endpoint(self) -> np.ndarray:
        return self.points[-1]

    @property
    def steps(self) -> int:
        return len(self.times) - 1

    def values(self, f) -> np.ndarray:
        return f._value(self.points)

    def rows(self, f, field=None):
        """(t, start index, coordinates, f value, field norm) for every recorded point"""
        values = self.values(f)
        norms = np.linalg.norm(field(self.points), axis=-1) if field is not None \
            else np.linalg.norm(f.gradient(self.points), axis=-1)
        for step, t in enumerate(self.times):
            for start in range(self.points.shape[1]):
                yield (float(t), start, self.points[step, start].tolist(), float(values[step, start]),
                       float(norms[step, start]))


def rk4(field, x0: np.ndarray, T: float, steps: int) -> Trajectory:
    """Classical fixed step fourth order Runge-Kutta for the autonomous ODE x' = field(x)"""
    dt = T / steps
    points = np.empty((steps + 1,) + x0.shape)
    points[0] = x0
    x = x0
    for i in range(steps):
        k1 = field(x)
        k2 = field(x + 0.5 * dt * k1)
        k3 = field(x + 0.5 * dt * k2)
        k4 = field(x + dt * k3)
        x = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        points[i + 1] = x
    return Trajectory(times=np.linspace(0.0, T, steps + 1), points=points)


def flow(field, x0, T: float = 1.0, initial_steps: int = 64, max_steps: int = 4096,
         tolerance: float = 1e-9) -> Trajectory:
    """
    Integrate x' = field(x) from every starting point up to time T (negative T runs backwards),
    doubling the step count until the endpoints move by less than tolerance

    :param field: callable on (m, n) arrays
    :param x0: starting point or m x n array of starting points
    :param T: final time
    :param initial_steps: step count of the first pass
    :param max_steps: step count beyond which the integration is reported as stalled
    :param tolerance: endpoint change accepted between successive step counts
    :return: trajectory of the finest pass
    """
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    if T == 0.0:
        return Trajectory(times=np.zeros(1), points=x0[None, :, :].copy())
    steps = initial_steps
    current = rk4(field, x0, T, steps)
    change = np.inf
    while steps < max_steps:
        steps *= 2
        finer = rk4(field, x0, T, steps)
        change = float(np.max(np.linalg.norm(finer.endpoint - current.endpoint, axis=-1)))
        current = finer
        logger.debug('RK4 with %d steps: endpoint change %.3g', steps, change)
        if change < tolerance:
            return current
    if change <= 1e3 * tolerance:
        logger.warning('Flow endpoints settled only to %.3g within %d steps', change, max_steps)
        return current
    logger.warning('Flow did not settle below %.3g within %d steps', tolerance, max_steps)
    raise FlowStallError('Step halving reached %d steps without endpoint agreement (change %.3g)'
                         % (max_steps, change))
