__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist

from ..errors import FunctionalError
from .functional import Functional

__all__ = ['PalaisSmaleTrace', 'PalaisSmaleDiagnosis', 'check_ps']


@dataclass
class PalaisSmaleTrace:
    """A sequence (u_n) with its values and gradient norms, recorded against a target level"""
    points: list = field(default_factory=list)
    values: list = field(default_factory=list)
    gradient_norms: list = field(default_factory=list)
    level: float = 0.0

    @classmethod
    def record(cls, f: Functional, points, level: float):
        points = [np.asarray(point, dtype=float) for point in points]
        trace = cls(level=float(level))
        for point in points:
            trace.append(f, point)
        return trace

    def append(self, f: Functional, point):
        point = np.asarray(point, dtype=float)
        self.points.append(point)
        self.values.append(f.value(point))
        self.gradient_norms.append(f.gradient_norm(point))

    def __len__(self):
        return len(self.points)

    def validate(self, f: Functional, tolerance: float = 1e-12) -> bool:
        if not len(self.points) == len(self.values) == len(self.gradient_norms):
            return False
        for point, value, norm in zip(self.points, self.values, self.gradient_norms):
            if abs(f.value(point) - value) > tolerance or abs(f.gradient_norm(point) - norm) > tolerance:
                return False
        return True

    def to_dict(self):
        return {'level': self.level,
                'points': [np.asarray(point).tolist() for point in self.points],
                'values': list(self.values),
                'gradient_norms': list(self.gradient_norms)}


@dataclass(frozen=True)
class PalaisSmaleDiagnosis:
    almost_critical: bool
    clustered: bool
    divergent: bool
    tail_length: int
    tail_value_gap: float
    tail_gradient_max: float
    closest_pair: float

    def to_dict(self):
        return dict(self.__dict__)


def check_ps(f: Functional, trace: PalaisSmaleTrace, c: float, tol_v: float = 1e-3, tol_g: float = 1e-3,
             tol_x: float = 1e-3, window: int = 20, norm_bound: float = 10.0) -> PalaisSmaleDiagnosis:
    """
    Finite proxy for the Palais-Smale condition at level c, looking at the last window entries.
    The tail is almost critical when its values sit within tol_v of c and its gradient norms below
    tol_g; a cluster exists when two tail points are within tol_x; the tail diverges when its norms
    grow strictly and end beyond norm_bound

    :param f:
    :param trace:
    :param c: level
    :return:
    """
    if len(trace) == 0:
        raise FunctionalError('Palais-Smale check needs a nonempty trace')
    tail = slice(max(0, len(trace) - window), len(trace))
    points = np.array(trace.points[tail], dtype=float).reshape(-1, f.dimension)
    values = np.asarray(trace.values[tail], dtype=float)
    norms = np.asarray(trace.gradient_norms[tail], dtype=float)
    value_gap = float(np.max(np.abs(values - c)))
    gradient_max = float(np.max(norms))
    closest = float(np.min(pdist(points))) if len(points) > 1 else 0.0
    sizes = np.linalg.norm(points, axis=1)
    divergent = bool(len(sizes) > 1 and np.all(np.diff(sizes) > 0.0) and sizes[-1] > norm_bound)
    return PalaisSmaleDiagnosis(almost_critical=value_gap <= tol_v and gradient_max <= tol_g,
                                clustered=closest <= tol_x,
                                divergent=divergent,
                                tail_length=len(points),
                                tail_value_gap=value_gap,
                                tail_gradient_max=gradient_max,
                                closest_pair=closest)
