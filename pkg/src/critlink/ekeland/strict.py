__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import EkelandError, EkelandPreconditionError
from ..functional import Functional
from ..geometry import closest_in_cells
from ..space import FiniteSampleSet
from .mapspace import Entry, LadderOracle, MapSpace
from .principle import EkelandCertificate, ekeland_point
from .subdifferential import TAU_M, max_subdifferential, min_norm_descent

__all__ = ['NodeMax', 'StrictPoint', 'strict_case_search']

logger = logging.getLogger(__name__)


class NodeMax:
    """Max of f over the node images of a map, with one entry per node"""

    def __init__(self, f: Functional, space: MapSpace):
        self.f = f
        self.space = space

    def evaluate(self, images):
        values = self.f._value(images)
        gradients = self.f.gradient(images)
        entries = [Entry(value=float(values[node]), point=images[node].copy(), gradient=gradients[node],
                         nodes=np.array([node]), weights=np.ones(1), node=int(node)) for node in self.space.region]
        return float(np.max(values)), entries

    def __call__(self, images) -> float:
        return float(np.max(self.f._value(images)))


@dataclass
class StrictPoint:
    u: np.ndarray
    f_value: float
    grad_norm: float
    dist_to_image: float
    eps: float
    c: float
    d: float
    bound_checks: dict
    certificate: EkelandCertificate = None

    @property
    def holds(self) -> bool:
        return all(self.bound_checks.values())

    def to_dict(self):
        certificate = None
        if self.certificate is not None:
            certificate = self.certificate.to_dict()
            certificate.pop('y')
        return {'u': self.u.tolist(), 'f_value': self.f_value, 'grad_norm': self.grad_norm,
                'dist_to_image': self.dist_to_image, 'eps': self.eps, 'c': self.c, 'd': self.d,
                'bound_checks': self.bound_checks, 'certificate': certificate}


def strict_case_search(f: Functional, pair, p, eps: float, c: float, d: float = None, tau: float = 1e-8,
                       tau_M: float = TAU_M, max_moves: int = 2000) -> StrictPoint:
    """
    Almost critical point when the minimax level c lies strictly above the boundary level d. The max of
    f over node images is minimized over maps pinned on the boundary of Q, starting from p, with Ekeland
    slack eps and radius sqrt(eps)

    :param f:
    :param pair: linking pair whose mesh carries p
    :param p: admissible map with max f(p) <= c + eps
    :param eps: in (0, c - d)
    :param c: minimax level
    :param d: boundary level, default the max of f over the boundary nodes of p
    :return: point u with c - eps <= f(u) <= max f(p), dist(u, p(Q)) <= sqrt(eps) and |f'(u)| <= sqrt(eps)
    """
    boundary = pair.mesh.boundary_nodes
    d = float(np.max(f._value(p.node_images[boundary]))) if d is None else float(d)
    if c - d <= 0.0:
        raise EkelandPreconditionError('No gap between c = %.8g and d = %.8g: use the limiting case search' % (c, d))
    if not 0.0 < eps < c - d:
        raise EkelandPreconditionError('eps = %g must lie in (0, c - d = %.8g)' % (eps, c - d))
    sup_p = float(np.max(f._value(p.node_images)))
    if sup_p > c + eps:
        logger.warning('max f(p) = %.8g exceeds c + eps = %.8g', sup_p, c + eps)
        raise EkelandPreconditionError('max f(p) = %.8g > c + eps = %.8g' % (sup_p, c + eps))
    space = MapSpace(pair, p.node_images, np.arange(pair.mesh.node_count), boundary)
    objective = NodeMax(f, space)
    delta = float(np.sqrt(eps))
    oracle = LadderOracle(space, objective, top=delta, floor=1e-9 * delta, slope=eps / delta, tau_M=tau_M)
    certificate = ekeland_point(space, objective, space.initial(), eps, delta, oracle, infimum=c, max_moves=max_moves)
    if not space.contains(certificate.y):
        raise EkelandError('Ekeland map moved a pinned node')
    value, entries = objective.evaluate(certificate.y)
    M, _ = max_subdifferential([entry.value for entry in entries], oracle.tie_band)
    points = np.array([entries[i].point for i in M])
    t0, bound, _ = min_norm_descent(f.gradient(points))
    u = points[t0].copy()
    f_value = float(f.value(u))
    distance, _, _ = closest_in_cells(pair, p.node_images, np.arange(len(pair.mesh.cells)), FiniteSampleSet([u]))
    bound_checks = {'value_low': f_value >= c - eps - tau,
                    'value_high': f_value <= sup_p + tau,
                    'distance': distance <= delta + tau,
                    'gradient': bound <= delta + tau}
    point = StrictPoint(u=u, f_value=f_value, grad_norm=bound, dist_to_image=float(distance), eps=eps, c=c, d=d,
                        bound_checks=bound_checks, certificate=certificate)
    if not point.holds:
        logger.warning('Strict case point fails its bounds: %s', bound_checks)
        raise EkelandError('Strict case bounds fail at eps %g: %s' % (eps, bound_checks))
    logger.info('u = %s: f %.8g, |f\'| %.3g, dist to p(Q) %.3g', u.tolist(), f_value, bound, distance)
    return point
