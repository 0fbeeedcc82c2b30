__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from ..errors import EkelandError
from ..space import sphere_directions

__all__ = ['TAU_M', 'DiscreteMeasure', 'MeasureSimplex', 'max_subdifferential', 'min_norm_descent',
           'direction_net', 'decoupled_minimax_value']

logger = logging.getLogger(__name__)

TAU_M = 1e-8


@dataclass
class DiscreteMeasure:
    """Probability measure with finite support: nonnegative weights of mass one"""
    support: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.support = np.asarray(self.support, dtype=int)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.support.shape != self.weights.shape:
            raise EkelandError('Measure support and weights differ in length')
        if np.any(self.weights < -1e-12) or abs(float(np.sum(self.weights)) - 1.0) > 1e-9:
            raise EkelandError('Measure weights must be nonnegative with mass one')

    def pair(self, values) -> float:
        """<mu, x> for a function x given by its values on the index set"""
        return float(np.dot(self.weights, np.asarray(values, dtype=float)[self.support]))


@dataclass
class MeasureSimplex:
    """All probability measures supported on the maximizer set"""
    support: np.ndarray

    @property
    def dimension(self) -> int:
        return len(self.support) - 1


def max_subdifferential(values, tau_M: float = TAU_M):
    """
    Maximizer set of a function on a finite index set, within tau_M of the max, and the simplex of
    measures supported on it, which is the subdifferential of the max function

    :param values: function values
    :param tau_M: tie band
    :return: (M, MeasureSimplex)
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise EkelandError('Maximizer set of an empty function')
    M = np.flatnonzero(values >= np.max(values) - tau_M)
    return M, MeasureSimplex(M)


def min_norm_descent(gradients):
    """
    Descent bound over a maximizer set: t0 is the point of least gradient norm, bound that norm and
    direction the unit vector against that gradient (zero when the gradient vanishes)

    :param gradients: |M| x n gradients at the maximizer set
    :return: (t0, bound, direction)
    """
    gradients = np.atleast_2d(np.asarray(gradients, dtype=float))
    if gradients.shape[0] == 0:
        raise EkelandError('min_norm_descent needs a nonempty maximizer set')
    norms = np.linalg.norm(gradients, axis=1)
    t0 = int(np.argmin(norms))
    bound = float(norms[t0])
    direction = -gradients[t0] / bound if bound > 0.0 else np.zeros(gradients.shape[1])
    return t0, bound, direction


def direction_net(n: int, count: int = None) -> np.ndarray:
    """Finite net of unit directions of R^n used for the discretized decoupled min-max"""
    if count is None:
        count = {1: 2, 2: 720, 3: 1500}.get(n, 2000)
    return sphere_directions(n, count)


def decoupled_minimax_value(gradients, directions: np.ndarray = None):
    """
    Value of inf over per-point directions h(i) of the net of max over measures mu of sum mu_i <g_i, h(i)>,
    solved as a linear program: minimize v subject to sum_j p_ij <g_i, d_j> <= v with p_i distributions
    over the net. The dual prices give a maximizing measure

    :param gradients: m x n gradients
    :param directions: k x n unit directions, default direction_net(n)
    :return: (value, maximizing DiscreteMeasure over the points, index of the binding point)
    """
    gradients = np.atleast_2d(np.asarray(gradients, dtype=float))
    m, n = gradients.shape
    directions = direction_net(n) if directions is None else np.asarray(directions, dtype=float)
    k = len(directions)
    pairing = gradients @ directions.T
    cost = np.zeros(m * k + 1)
    cost[-1] = 1.0
    upper = np.zeros((m, m * k + 1))
    equal = np.zeros((m, m * k + 1))
    for i in range(m):
        upper[i, i * k:(i + 1) * k] = pairing[i]
        upper[i, -1] = -1.0
        equal[i, i * k:(i + 1) * k] = 1.0
    bounds = [(0.0, None)] * (m * k) + [(None, None)]
    result = linprog(cost, A_ub=upper, b_ub=np.zeros(m), A_eq=equal, b_eq=np.ones(m), bounds=bounds,
                     method='highs')
    if not result.success:
        raise EkelandError('Min-max linear program failed: %s' % result.message)
    prices = -np.asarray(result.ineqlin.marginals)
    total = float(np.sum(prices))
    weights = np.clip(prices, 0.0, None) / total if total > 0.0 else np.full(m, 1.0 / m)
    binding = int(np.argmax(pairing.min(axis=1)))
    logger.debug('Decoupled min-max value %.6g over %d points and %d directions', result.fun, m, k)
    return float(result.fun), DiscreteMeasure(np.arange(m), weights / weights.sum()), binding
