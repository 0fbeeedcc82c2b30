__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from ..errors import DegreeUndefinedError, GeometryError, LinkingViolation
from .degree import ETA_DEG, DegreeResult, brouwer_degree
from .mesh import barycentric_lattice
from .pairs import LinkingPair

__all__ = ['TAU_LINK', 'Intersection', 'HomotopySample', 'LinkingReport', 'closest_in_cells', 'find_intersection',
           'verify_linking']

logger = logging.getLogger(__name__)

TAU_LINK = 1e-3


@dataclass
class Intersection:
    """A point u of Q, its image under the piecewise linear map and dist(image, S)"""
    u: np.ndarray
    image: np.ndarray
    residual: float
    cell: int
    barycentric: np.ndarray

    def to_dict(self):
        return {'u': self.u.tolist(), 'image': self.image.tolist(), 'residual': self.residual,
                'cell': self.cell, 'barycentric': self.barycentric.tolist()}


@dataclass
class HomotopySample:
    t: float
    degree: int = None
    boundary_margin: float = None
    result: DegreeResult = None

    @property
    def defined(self) -> bool:
        return self.degree is not None

    def to_dict(self):
        return {'t': self.t, 'degree': self.degree, 'boundary_margin': self.boundary_margin}


@dataclass
class LinkingReport:
    kind: str
    status: str
    samples: list = field(default_factory=list)
    witness: Intersection = None
    homotopy_witness: Intersection = None

    @property
    def degrees(self):
        return [sample.degree for sample in self.samples]

    def to_dict(self):
        return {'kind': self.kind,
                'status': self.status,
                'samples': [sample.to_dict() for sample in self.samples],
                'witness': None if self.witness is None else self.witness.to_dict(),
                'homotopy_witness': None if self.homotopy_witness is None else self.homotopy_witness.to_dict()}


def closest_in_cells(pair: LinkingPair, images: np.ndarray, cells, descriptor=None, divisions: int = 4,
                     polish: int = 3):
    """
    Minimize dist(g, S) over the given cells for the piecewise linear map g with the given node images.
    Segments are screened on 17 samples and finished with bounded scalar minimization; simplices are
    screened on a barycentric lattice and finished with SLSQP

    :return: (residual, cell, barycentric)
    """
    descriptor = pair.S if descriptor is None else descriptor
    cells = np.asarray(cells, dtype=int)
    corners = images[pair.mesh.cells[cells]]
    d = pair.dimension
    if d == 1:
        steps = np.linspace(0.0, 1.0, 17)
        lattice = np.column_stack([1.0 - steps, steps])
    else:
        lattice = barycentric_lattice(d, divisions)
    screened = descriptor.distance(np.einsum('mk,ckn->cmn', lattice, corners))
    best_rows = np.argmin(screened, axis=1)
    best_values = screened[np.arange(len(cells)), best_rows]
    residual, cell, weights = np.inf, int(cells[0]), lattice[0]
    for position in np.argsort(best_values, kind='stable')[:polish]:
        start = lattice[best_rows[position]]
        corner = corners[position]
        if d == 1:
            spacing = steps[1]
            low = max(0.0, start[1] - spacing)
            high = min(1.0, start[1] + spacing)
            found = minimize_scalar(lambda s: descriptor.distance((1.0 - s) * corner[0] + s * corner[1]),
                                    bounds=(low, high), method='bounded', options={'xatol': 1e-12})
            candidate = np.array([1.0 - found.x, found.x])
        else:
            def objective(tail):
                return descriptor.distance(np.concatenate([[1.0 - tail.sum()], tail]) @ corner) ** 2

            found = minimize(objective, start[1:], method='SLSQP', bounds=[(0.0, 1.0)] * d,
                             constraints=[{'type': 'ineq', 'fun': lambda tail: 1.0 - tail.sum()}],
                             options={'ftol': 1e-16, 'maxiter': 200})
            tail = np.clip(found.x, 0.0, 1.0)
            tail = tail / max(1.0, tail.sum())
            candidate = np.concatenate([[1.0 - tail.sum()], tail])
        for option in (candidate, start):
            value = float(descriptor.distance(option @ corner))
            if value < residual:
                residual, cell, weights = value, int(cells[position]), option
    return residual, cell, weights


def _node_location(pair: LinkingPair, node: int):
    cell = int(pair.mesh.cells_touching([node])[0])
    weights = (pair.mesh.cells[cell] == node).astype(float)
    return cell, weights


def find_intersection(gamma, pair: LinkingPair = None, tau_link: float = TAU_LINK, max_rounds: int = 6) -> Intersection:
    """
    Locate a point u of Q with gamma(u) on S. The search starts from the nodes whose images are closest
    to S and refines inside the cells around them, widening the candidate set each round

    :param gamma: admissible map carrying node_images on the mesh of pair
    :param pair: linking pair, default gamma.pair
    :param tau_link: acceptable residual dist(gamma(u), S)
    :param max_rounds: refinement rounds before a linking violation is reported
    :return:
    """
    pair = gamma.pair if pair is None else pair
    images = np.asarray(gamma.node_images, dtype=float)
    distances = pair.S.distance(images)
    order = np.argsort(distances, kind='stable')
    cell, weights = _node_location(pair, int(order[0]))
    residual = float(distances[order[0]])
    for attempt in range(max_rounds):
        count = min(len(order), 4 * 2 ** attempt)
        cells = pair.mesh.cells_touching(order[:count])
        found, found_cell, found_weights = closest_in_cells(pair, images, cells, polish=3 + attempt)
        if found < residual:
            residual, cell, weights = found, found_cell, found_weights
        logger.debug('Intersection round %d: %d cells, residual %.3g', attempt, len(cells), residual)
        if residual <= tau_link:
            break
    if residual > tau_link:
        logger.warning('No intersection with S below %.3g after %d rounds (best %.3g)', tau_link, max_rounds,
                       residual)
        raise LinkingViolation('gamma(Q) misses S: residual %.3g > %.3g; map inadmissible or mesh too coarse'
                               % (residual, tau_link), residual=residual, point=pair.point(cell, weights))
    return Intersection(u=pair.point(cell, weights), image=pair.interpolate(images, cell, weights),
                        residual=residual, cell=cell, barycentric=np.asarray(weights))


def _sample(pair, images, t, beta, eta) -> HomotopySample:
    values, target = pair.homotopy(t, images, beta)
    try:
        result = brouwer_degree(values, pair.mesh, target, eta)
    except DegreeUndefinedError as err:
        return HomotopySample(t=float(t), boundary_margin=err.margin)
    return HomotopySample(t=float(t), degree=result.degree, boundary_margin=result.boundary_margin, result=result)


def verify_linking(pair: LinkingPair, gamma, t_points: int = 11, beta: float = None, eta: float = ETA_DEG,
                   tau_link: float = TAU_LINK, max_depth: int = 4, max_workers: int = None) -> LinkingReport:
    """
    Follow the degree of the kind-specific homotopy from the identity (t = 0) to the linking map
    (t = 1). Intervals whose endpoints come within 100 eta of a boundary zero are bisected

    :param pair: saddle, mp_cylinder or silva pair
    :param gamma: admissible map on the mesh of pair
    :param t_points: size of the uniform t grid
    :param beta: cutoff slope for the silva homotopy, default the pair's
    :param eta: degree boundary margin
    :return: report with status linked, inconclusive or degree-changed
    """
    if not pair.supports_homotopy:
        raise GeometryError('verify_linking supports saddle, mp_cylinder and silva pairs, not %s' % pair.kind)
    images = np.asarray(gamma.node_images, dtype=float)
    grid = np.linspace(0.0, 1.0, t_points)
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        samples = list(executor.map(lambda t: _sample(pair, images, t, beta, eta), grid))
        for _ in range(max_depth):
            close = [index for index, sample in enumerate(samples)
                     if sample.boundary_margin is not None and sample.boundary_margin < 100.0 * eta]
            middles = sorted({0.5 * (samples[i].t + samples[j].t) for index in close
                              for i, j in ((index - 1, index), (index, index + 1)) if 0 <= i and j < len(samples)})
            middles = [t for t in middles if all(abs(t - sample.t) > 1e-12 for sample in samples)]
            if not middles:
                break
            samples = sorted(samples + list(executor.map(lambda t: _sample(pair, images, t, beta, eta), middles)),
                             key=lambda sample: sample.t)
    if samples[0].degree != 1:
        raise GeometryError('Identity degree at t = 0 is %r instead of 1' % samples[0].degree)
    if not all(sample.defined for sample in samples):
        status = 'inconclusive'
        logger.warning('Boundary zero met on the homotopy of %s; refine the mesh', pair.kind)
    elif any(sample.degree != 1 for sample in samples):
        status = 'degree-changed'
        logger.warning('Degree of the %s homotopy left 1: %s', pair.kind, [s.degree for s in samples])
    else:
        status = 'linked'
    report = LinkingReport(kind=pair.kind, status=status, samples=samples)
    last = samples[-1]
    if last.defined and last.result.certificate:
        cell, _, weights = last.result.certificate[0]
        image = pair.interpolate(images, cell, weights)
        report.homotopy_witness = Intersection(u=pair.point(cell, weights), image=image,
                                               residual=float(pair.S.distance(image)), cell=cell,
                                               barycentric=np.asarray(weights))
    try:
        report.witness = find_intersection(gamma, pair, tau_link)
    except LinkingViolation:
        if status == 'linked':
            report.status = 'inconclusive'
    return report
