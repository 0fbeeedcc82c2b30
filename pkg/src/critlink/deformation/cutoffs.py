__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

import numpy as np

from ..errors import DeformationError
from ..space import SetDescriptor, TAU_SET

__all__ = ['GapSet', 'cutoff_h', 'cutoff_rho']


def _scalar(values):
    values = np.asarray(values, dtype=float)
    return float(values) if values.ndim == 0 else values


class GapSet(SetDescriptor):
    """
    Set given by a continuous gap function that vanishes exactly on it. Band sets of a functional
    such as {|f - c| <= r} are known this way; the gap stands in for the distance
    """
    kind = 'gap'

    def __init__(self, n: int, gap, label: str = '', tolerance: float = TAU_SET):
        super().__init__(n, tolerance)
        self.gap = gap
        self.label = label

    def _distance(self, v):
        return np.asarray(self.gap(v), dtype=float)

    def contains(self, v):
        membership = np.asarray(self._distance(np.asarray(v, dtype=float))) <= 0.0
        return bool(membership) if membership.ndim == 0 else membership

    def sample(self, resolution=64, radius=10.0, rng=None):
        raise DeformationError('Gap set %s is known only through its gap function' % self.label)

    def __repr__(self):
        return 'GapSet(%s, n=%d)' % (self.label, self.n)


def cutoff_h(x, A1: SetDescriptor, A2: SetDescriptor):
    """
    Quotient |x - A1| / (|x - A1| + |x - A2|): 0 on A1, 1 on A2

    :param x: point or (..., n) array
    :param A1:
    :param A2: closed set disjoint from A1
    :return:
    """
    x = np.asarray(x, dtype=float)
    near = np.asarray(A1._distance(x))
    far = np.asarray(A2._distance(x))
    total = near + far
    if np.any(total <= 0.0):
        raise DeformationError('Cutoff sets overlap: a point lies in both A1 and A2')
    return _scalar(near / total)


def cutoff_rho(s):
    """1 on [0, 1] and 1 / s beyond, so that s rho(s) = min(s, 1)"""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0.0):
        raise DeformationError('cutoff_rho needs s >= 0')
    return _scalar(1.0 / np.maximum(s, 1.0))
