__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import EkelandError, EkelandPreconditionError
from ..functional import Functional
from ..geometry import LinkingPair, closest_in_cells
from ..space import SetDescriptor, SphereSet, SubspaceSet
from .mapspace import Entry, LadderOracle, MapSpace
from .principle import EkelandCertificate, ekeland_point
from .subdifferential import TAU_M, max_subdifferential, min_norm_descent

__all__ = ['penalty_psi', 'penalty_gradient', 'RegionA', 'build_A', 'crossing_witnesses', 'PenalizedMax',
           'functional_I', 'LocalizedPoint', 'limiting_case_search']

logger = logging.getLogger(__name__)


def penalty_psi(x, S: SetDescriptor, eps: float):
    """max(0, eps^2 - eps dist(x, S)), a value in [0, eps^2] that is eps Lipschitz"""
    if eps <= 0.0:
        raise EkelandPreconditionError('Penalty needs eps > 0, got %g' % eps)
    value = np.maximum(0.0, eps ** 2 - eps * np.asarray(S.distance(x)))
    return float(value) if value.ndim == 0 else value


def penalty_gradient(x, S: SetDescriptor, eps: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    inside = np.asarray(S.distance(x)) < eps
    return np.where(inside[..., None], -eps * S.distance_gradient(x), 0.0)


@dataclass
class RegionA:
    """
    Nodes of Q whose image under g lies within eps of S, and those among them sharing a cell with a node
    outside, where maps of the region are pinned to g
    """
    nodes: np.ndarray
    boundary: np.ndarray
    distances: np.ndarray
    eps: float

    @property
    def free(self) -> np.ndarray:
        return np.setdiff1d(self.nodes, self.boundary)

    def to_dict(self):
        return {'nodes': self.nodes.tolist(), 'boundary': self.boundary.tolist(), 'eps': self.eps}


def build_A(g, pair: LinkingPair, eps: float) -> RegionA:
    """
    :param g: admissible map with node_images on the mesh of pair
    :param pair:
    :param eps: must stay below dist(boundary of Q, S) so the region never reaches the boundary of Q
    :return:
    """
    if eps <= 0.0 or eps >= pair.boundary_margin:
        logger.warning('eps %.3g outside (0, dist(boundary of Q, S) = %.3g)', eps, pair.boundary_margin)
        raise EkelandPreconditionError('eps = %g must lie in (0, %.6g)' % (eps, pair.boundary_margin))
    distances = np.asarray(pair.S.distance(g.node_images))
    inside = distances < eps
    nodes = np.flatnonzero(inside)
    if len(nodes) == 0:
        raise EkelandError('No node image within %g of S: mesh too coarse or linking violated' % eps)
    mesh = pair.mesh
    outside_cells = mesh.cells_touching(np.flatnonzero(~inside))
    touching = np.unique(mesh.cells[outside_cells])
    boundary = np.intersect1d(nodes, touching)
    logger.debug('Region A: %d nodes, %d pinned', len(nodes), len(boundary))
    return RegionA(nodes=nodes, boundary=boundary, distances=distances, eps=eps)


def _subspace_crossings(S: SubspaceSet, corners):
    complement = np.eye(S.n) - S.basis @ S.basis.T
    w = (corners - S.center) @ complement
    edges = np.swapaxes(w[:, 1:] - w[:, :1], 1, 2)
    tails = np.einsum('cdn,cn->cd', np.linalg.pinv(edges), -w[:, 0])
    residual = np.linalg.norm(np.einsum('cnd,cd->cn', edges, tails) + w[:, 0], axis=-1)
    scale = 1.0 + np.max(np.abs(w), axis=(1, 2))
    weights = np.concatenate([1.0 - tails.sum(axis=1, keepdims=True), tails], axis=1)
    found = (residual <= 1e-10 * scale) & np.all(weights >= -1e-12, axis=1)
    return [(c, np.clip(weights[c], 0.0, 1.0) / np.clip(weights[c], 0.0, 1.0).sum()) for c in np.flatnonzero(found)]


def _sphere_crossings(S: SphereSet, corners):
    start = corners[:, 0] - S.center
    step = corners[:, 1] - corners[:, 0]
    a = np.sum(step ** 2, axis=-1)
    b = 2.0 * np.sum(start * step, axis=-1)
    c = np.sum(start ** 2, axis=-1) - S.radius ** 2
    found = []
    for cell in np.flatnonzero((a > 0.0) & (b ** 2 - 4.0 * a * c >= 0.0)):
        for s in np.roots([a[cell], b[cell], c[cell]]).real:
            if -1e-12 <= s <= 1.0 + 1e-12:
                s = min(1.0, max(0.0, s))
                found.append((cell, np.array([1.0 - s, s])))
    return found


def crossing_witnesses(pair: LinkingPair, images: np.ndarray, cells, S: SetDescriptor = None):
    """
    Points of the piecewise linear map with the given node images that lie on S, inside the given cells.
    Affine subspaces are solved cell by cell as linear systems, full spheres over segments as quadratics,
    everything else by minimizing the distance inside cells that come close

    :return: list of (cell, barycentric weights)
    """
    S = pair.S if S is None else S
    cells = np.asarray(cells, dtype=int)
    if len(cells) == 0:
        return []
    corners = images[pair.mesh.cells[cells]]
    if isinstance(S, SubspaceSet):
        found = _subspace_crossings(S, corners)
    elif isinstance(S, SphereSet) and pair.dimension == 1 and S.basis.shape[1] == S.n and S.half_axis is None:
        found = _sphere_crossings(S, corners)
    else:
        reach = np.max(np.linalg.norm(corners - corners[:, :1], axis=-1), axis=1)
        near = np.flatnonzero(np.min(S.distance(corners), axis=1) <= reach)
        found = []
        for position in near:
            residual, _, weights = closest_in_cells(pair, images, cells[position:position + 1], S)
            if residual <= S.tolerance:
                found.append((position, weights))
    return [(int(cells[position]), weights) for position, weights in found]


class PenalizedMax:
    """
    Max over the region of f(k(t)) + penalty(k(t)) for maps k of a MapSpace, taken over the region nodes
    and every point where k crosses S. Crossings in cells without free nodes are those of the base map
    """

    def __init__(self, f: Functional, space: MapSpace, S: SetDescriptor, eps: float):
        self.f = f
        self.space = space
        self.S = S
        self.eps = eps
        mesh = space.pair.mesh
        self.moving_cells = mesh.cells_touching(space.free) if len(space.free) else np.zeros(0, dtype=int)
        fixed = np.setdiff1d(np.arange(len(mesh.cells)), self.moving_cells)
        self._fixed_entries = self._witness_entries(space.base, crossing_witnesses(space.pair, space.base, fixed, S))

    def _witness_entries(self, images, crossings):
        if not crossings:
            return []
        cells = self.space.pair.mesh.cells
        points = np.array([weights @ images[cells[cell]] for cell, weights in crossings])
        values = self.f._value(points) + penalty_psi(points, self.S, self.eps)
        gradients = self.f.gradient(points) + penalty_gradient(points, self.S, self.eps)
        return [Entry(value=float(values[i]), point=points[i], gradient=gradients[i], nodes=cells[cell].copy(),
                      weights=np.asarray(weights)) for i, (cell, weights) in enumerate(crossings)]

    def evaluate(self, images):
        """
        :param images: full N x n node images of a map of the space
        :return: (value, entries)
        """
        nodes = self.space.region
        points = images[nodes]
        values = self.f._value(points) + penalty_psi(points, self.S, self.eps)
        gradients = self.f.gradient(points) + penalty_gradient(points, self.S, self.eps)
        entries = [Entry(value=float(values[i]), point=points[i].copy(), gradient=gradients[i],
                         nodes=np.array([node]), weights=np.ones(1), node=int(node)) for i, node in enumerate(nodes)]
        entries += self._fixed_entries
        entries += self._witness_entries(images, crossing_witnesses(self.space.pair, images, self.moving_cells, self.S))
        return max(entry.value for entry in entries), entries

    def __call__(self, images) -> float:
        return self.evaluate(images)[0]


def functional_I(f: Functional, k, S: SetDescriptor, eps: float, space: MapSpace = None, tau_M: float = TAU_M):
    """
    Value of the penalized max functional at k and its maximizer set

    :param f:
    :param k: node images of a map of space, or an admissible map whose region is then built from k itself
    :param S:
    :param eps:
    :param space: map space of the region, default the region of k
    :param tau_M: tie band of the maximizer set
    :return: (value, list of maximizing entries)
    """
    if space is None:
        region = build_A(k, k.pair, eps)
        space = MapSpace(k.pair, k.node_images, region.nodes, region.boundary)
    images = getattr(k, 'node_images', k)
    value, entries = PenalizedMax(f, space, S, eps).evaluate(np.asarray(images, dtype=float))
    M, _ = max_subdifferential([entry.value for entry in entries], tau_M)
    return value, [entries[i] for i in M]


@dataclass
class LocalizedPoint:
    x_eps: np.ndarray
    f_value: float
    grad_norm: float
    dist_to_S: float
    eps: float
    c: float
    bound_checks: dict
    chain: dict
    certificate: EkelandCertificate = None
    M: list = field(default_factory=list)
    t0: int = 0

    @property
    def holds(self) -> bool:
        return all(self.bound_checks[key] for key in ('value_low', 'value_high', 'distance', 'gradient')) \
            and self.chain['holds']

    def to_dict(self):
        certificate = None
        if self.certificate is not None:
            certificate = self.certificate.to_dict()
            certificate.pop('y')
        return {'x_eps': self.x_eps.tolist(), 'f_value': self.f_value, 'grad_norm': self.grad_norm,
                'dist_to_S': self.dist_to_S, 'eps': self.eps, 'c': self.c, 'bound_checks': self.bound_checks,
                'chain': self.chain, 'certificate': certificate, 'M': [entry.to_dict() for entry in self.M],
                't0': self.t0}


def _sampled_alpha(f: Functional, pair: LinkingPair, resolution: int = 64) -> float:
    radius = max(10.0, 2.0 * float(np.max(np.linalg.norm(pair.nodes, axis=1))))
    return float(np.min(f._value(pair.S.sample(resolution, radius))))


def limiting_case_search(f: Functional, pair: LinkingPair, g, eps: float, c: float = None, tau: float = 1e-8,
                         tau_M: float = TAU_M, max_moves: int = 2000) -> LocalizedPoint:
    """
    Almost critical point near S when the minimax level equals the inf of f on S. Minimizes the penalized
    max functional over maps of the region A pinned to g, with Ekeland slack eps^2 / 4 and radius eps / 2,
    and takes the point of least gradient among the maximizers of the Ekeland map

    :param f:
    :param pair:
    :param g: admissible map with max f(g) < c + eps^2 / 4
    :param eps: in (0, min(1, dist(boundary of Q, S)) / 2)
    :param c: minimax level, default the sampled inf of f on S
    :param tau: slack on the bound checks
    :param tau_M: least tie band of the maximizer set
    :param max_moves: Ekeland moves before the candidate oracle is declared exhausted
    :return:
    """
    limit = min(1.0, pair.boundary_margin) / 2.0
    if not 0.0 < eps < limit:
        logger.warning('eps %.3g outside (0, %.3g)', eps, limit)
        raise EkelandPreconditionError('eps = %g must lie in (0, min(1, dist(boundary of Q, S)) / 2 = %.6g)'
                                       % (eps, limit))
    c = _sampled_alpha(f, pair) if c is None else float(c)
    sup_g = float(np.max(f._value(g.node_images)))
    if sup_g >= c + eps ** 2 / 4.0:
        logger.warning('max f(g) = %.8g is not below c + eps^2 / 4 = %.8g', sup_g, c + eps ** 2 / 4.0)
        raise EkelandPreconditionError('max f(g) = %.8g >= c + eps^2 / 4 = %.8g' % (sup_g, c + eps ** 2 / 4.0))
    region = build_A(g, pair, eps)
    space = MapSpace(pair, g.node_images, region.nodes, region.boundary)
    objective = PenalizedMax(f, space, pair.S, eps)
    delta = eps / 2.0
    oracle = LadderOracle(space, objective, top=delta, floor=1e-9 * delta, slope=eps / 2.0, tau_M=tau_M)
    start = space.initial()
    certificate = ekeland_point(space, objective, start, eps ** 2 / 4.0, delta, oracle, infimum=c + eps ** 2,
                                max_moves=max_moves)
    if not space.contains(certificate.y):
        raise EkelandError('Ekeland map moved a node of the boundary of A')
    value, entries = objective.evaluate(certificate.y)
    M, _ = max_subdifferential([entry.value for entry in entries], oracle.tie_band)
    maximizers = [entries[i] for i in M]
    points = np.array([entry.point for entry in maximizers])
    t0, bound, _ = min_norm_descent(f.gradient(points))
    x_eps = points[t0].copy()
    f_value = float(f.value(x_eps))
    distance = float(pair.S.distance(x_eps))
    bound_checks = {'value_low': f_value >= c - tau,
                    'value_high': f_value <= c + 1.25 * eps ** 2 + tau,
                    'distance': distance <= 1.5 * eps + tau,
                    'gradient': bound <= 1.5 * eps + tau,
                    'gradient_half_eps': bound <= 0.5 * eps + tau}
    lower, upper = c + eps ** 2, c + 1.25 * eps ** 2
    chain = {'lower': lower, 'I_hat': value, 'I_tilde': certificate.start_value, 'upper': upper,
             'holds': lower - tau <= value <= certificate.start_value + tau and certificate.start_value <= upper + tau}
    point = LocalizedPoint(x_eps=x_eps, f_value=f_value, grad_norm=bound, dist_to_S=distance, eps=eps, c=c,
                           bound_checks=bound_checks, chain=chain, certificate=certificate, M=maximizers, t0=int(t0))
    if not point.holds:
        logger.warning('Localized point fails its bounds: %s, chain %s', bound_checks, chain)
        raise EkelandError('Limiting case bounds fail at eps %g: checks %s, chain %s' % (eps, bound_checks, chain))
    if not bound_checks['gradient_half_eps']:
        logger.info('|f\'(x_eps)| = %.3g is within 3/2 eps but above eps / 2', bound)
    logger.info('x_eps = %s: f %.8g, |f\'| %.3g, dist to S %.3g', x_eps.tolist(), f_value, bound, distance)
    return point
