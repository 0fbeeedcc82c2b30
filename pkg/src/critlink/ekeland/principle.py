__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import EkelandError, EkelandPreconditionError, OracleExhaustedError

__all__ = ['EkelandCertificate', 'GridSpace', 'grid_space', 'ekeland_point', 'count_violations']

logger = logging.getLogger(__name__)


@dataclass
class EkelandCertificate:
    """
    Point y with a) phi(y) <= phi(x), b) dist(x, y) <= delta and c) phi(z) > phi(y) - (eps / delta) dist(z, y)
    for every candidate z examined at y
    """
    y: object
    value: float
    start_value: float
    eps: float
    delta: float
    distance: float
    a_holds: bool
    b_holds: bool
    c_witness_count: int
    c_violations: int
    moves: int

    @property
    def holds(self) -> bool:
        return self.a_holds and self.b_holds and self.c_violations == 0

    def to_dict(self):
        y = self.y.tolist() if isinstance(self.y, np.ndarray) else self.y
        return {'y': y, 'value': self.value, 'start_value': self.start_value, 'eps': self.eps,
                'delta': self.delta, 'distance': self.distance, 'a_holds': self.a_holds, 'b_holds': self.b_holds,
                'c_witness_count': self.c_witness_count, 'c_violations': self.c_violations, 'moves': self.moves}


class GridSpace:
    """Finite metric space of grid points with euclidean distance; points are referred to by index"""

    def __init__(self, points, values):
        points = np.asarray(points, dtype=float)
        self.points = points.reshape(len(points), -1)
        self.values = np.asarray(values, dtype=float).reshape(len(self.points))
        if not np.all(np.isfinite(self.values)):
            raise EkelandError('Grid values must be finite')

    def phi(self, index) -> float:
        return float(self.values[index])

    def distance(self, i, j) -> float:
        return float(np.linalg.norm(self.points[i] - self.points[j]))

    def candidates(self, index):
        return range(len(self.points))

    @property
    def infimum(self) -> float:
        return float(np.min(self.values))

    def __len__(self):
        return len(self.points)


def grid_space(points, values) -> GridSpace:
    return GridSpace(points, values)


def count_violations(space, phi, y, eps: float, delta: float, candidates) -> (int, int):
    """Candidates z != y with phi(z) <= phi(y) - (eps / delta) dist(z, y), and the number examined"""
    slope = eps / delta
    phi_y = phi(y)
    violations = 0
    examined = 0
    for z in candidates:
        gap = space.distance(z, y)
        if gap == 0.0:
            continue
        examined += 1
        if phi(z) <= phi_y - slope * gap:
            violations += 1
    return violations, examined


def ekeland_point(space, phi, x, eps: float, delta: float, candidate_oracle=None, infimum: float = None,
                  max_moves: int = 10000) -> EkelandCertificate:
    """
    Ekeland point by iterated moves: while some candidate z satisfies phi(z) <= phi(y) - (eps / delta) dist(z, y)
    move to the lowest such z. A violator farther than delta from x can only exist when phi(x) exceeds
    the infimum by more than eps

    :param space: metric space with a distance(p, q) method
    :param phi: lower semicontinuous functional on the space, bounded below
    :param x: starting point with phi(x) <= inf phi + eps
    :param eps: optimality slack
    :param delta: localization radius
    :param candidate_oracle: callable y -> iterable of candidate points, default space.candidates
    :param infimum: known infimum, or lower bound on it, for the precondition check
    :param max_moves: moves before the oracle is declared exhausted
    :return:
    """
    if eps <= 0.0 or delta <= 0.0:
        raise EkelandPreconditionError('Ekeland needs eps > 0 and delta > 0, got %g and %g' % (eps, delta))
    oracle = candidate_oracle if candidate_oracle is not None else space.candidates
    if infimum is None:
        infimum = getattr(space, 'infimum', None)
    start_value = float(phi(x))
    if infimum is not None and start_value > infimum + eps + 1e-12:
        logger.warning('Ekeland start value %.6g exceeds inf + eps = %.6g', start_value, infimum + eps)
        raise EkelandPreconditionError('phi(x) = %.6g > inf + eps = %.6g' % (start_value, infimum + eps))
    slope = eps / delta
    y, phi_y = x, start_value
    for move in range(max_moves + 1):
        best, best_value = None, None
        examined = 0
        for z in oracle(y):
            gap = space.distance(z, y)
            if gap == 0.0:
                continue
            examined += 1
            value = float(phi(z))
            if value <= phi_y - slope * gap and (best is None or value < best_value):
                best, best_value = z, value
        if best is None:
            distance = float(space.distance(x, y))
            certificate = EkelandCertificate(y=y, value=phi_y, start_value=start_value, eps=eps, delta=delta,
                                             distance=distance, a_holds=phi_y <= start_value,
                                             b_holds=distance <= delta * (1.0 + 1e-12), c_witness_count=examined,
                                             c_violations=0, moves=move)
            logger.debug('Ekeland point after %d moves: phi %.8g, distance %.3g', move, phi_y, distance)
            return certificate
        if space.distance(x, best) > delta * (1.0 + 1e-12):
            logger.warning('Ekeland violator at distance %.3g beyond delta %.3g', space.distance(x, best), delta)
            raise EkelandPreconditionError('Descent left the delta ball: phi(x) exceeds inf + eps')
        logger.debug('Ekeland move %d: phi %.8g -> %.8g', move + 1, phi_y, best_value)
        y, phi_y = best, best_value
    logger.warning('Ekeland iteration did not stabilize in %d moves', max_moves)
    raise OracleExhaustedError('No Ekeland point after %d moves; phi may be unbounded below' % max_moves,
                               candidate=y)
