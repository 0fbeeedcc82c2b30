__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, root

from ..deformation import classical_deform
from ..ekeland import LocalizedPoint, limiting_case_search
from ..errors import DeformationError, FlowStallError, GeometryBoundsError, HypothesisError, MinimaxError
from ..functional import Functional, PalaisSmaleTrace, check_ps
from ..geometry import LinkingPair, barycentric_lattice
from ..space import SubspaceSet
from .admissible import AdmissibleMap

__all__ = ['TAU_C', 'sup_on_map', 'subdivided_sup', 'refine_sup', 'GeometryBounds', 'check_geometry_bounds',
           'MinimaxReport', 'estimate_cgamma', 'Localization', 'locate_on_S']

logger = logging.getLogger(__name__)

TAU_C = 1e-4


def sup_on_map(f: Functional, gamma: AdmissibleMap):
    """Exact max of f over the node images and the first node attaining it"""
    values = f._value(gamma.node_images)
    node = int(np.argmax(values))
    return float(values[node]), node


def subdivided_sup(f: Functional, gamma: AdmissibleMap, node: int, divisions: int = 2) -> float:
    """Max of f over a barycentric subdivision of the cells around a node"""
    pair = gamma.pair
    lattice = barycentric_lattice(pair.dimension, divisions)
    cells = pair.mesh.cells[pair.mesh.cells_touching([node])]
    points = np.einsum('mk,ckn->cmn', lattice, gamma.node_images[cells])
    return float(np.max(f._value(points)))


def refine_sup(f: Functional, gamma: AdmissibleMap, node: int, tau_sup: float = 1e-6, max_divisions: int = 64):
    """
    Bisect the cells around the argmax node until one more bisection raises the max by less than tau_sup

    :return: (refined sup, divisions reached, converged)
    """
    previous = float(f._value(gamma.node_images[node]))
    divisions = 2
    while divisions <= max_divisions:
        current = subdivided_sup(f, gamma, node, divisions)
        if current - previous < tau_sup:
            return current, divisions, True
        logger.debug('%d divisions raise the sup by %.3g', divisions, current - previous)
        previous = current
        divisions *= 2
    return previous, divisions // 2, False


@dataclass
class GeometryBounds:
    alpha: float
    boundary_max: float
    holds: bool
    alpha_point: np.ndarray = None
    subspace_max: float = None

    def to_dict(self):
        return {'alpha': self.alpha, 'boundary_max': self.boundary_max, 'holds': self.holds,
                'alpha_point': None if self.alpha_point is None else self.alpha_point.tolist(),
                'subspace_max': self.subspace_max}


def check_geometry_bounds(f: Functional, pair: LinkingPair, tau_b: float = 1e-8, resolution: int = 64,
                          radius: float = None) -> GeometryBounds:
    """
    alpha = inf of f over a sample of S and the max of f over the boundary nodes of Q. The linking
    hypothesis asks boundary_max <= alpha. With a V2 factor the sampled sup of f over V2 is reported too

    :param f:
    :param pair:
    :param tau_b: slack on boundary_max <= alpha
    :param resolution: sample resolution for S and V2
    :param radius: cut radius for unbounded sets, default covering Q twice
    :return:
    """
    radius = radius if radius is not None else max(10.0, 2.0 * float(np.max(np.linalg.norm(pair.nodes, axis=1))))
    sample = pair.S.sample(resolution, radius)
    values = f._value(sample)
    alpha = float(np.min(values))
    boundary_max = float(np.max(f._value(pair.nodes[pair.mesh.boundary_nodes])))
    bounds = GeometryBounds(alpha=alpha, boundary_max=boundary_max, holds=boundary_max <= alpha + tau_b,
                            alpha_point=sample[int(np.argmin(values))])
    if pair.kind != 'mp_path' and pair.decomp.d2 >= 1:
        subspace = SubspaceSet(pair.decomp.basis2, n=pair.n).sample(resolution, radius)
        bounds.subspace_max = float(np.max(f._value(subspace)))
    if not bounds.holds:
        logger.warning('Boundary max %.6g exceeds alpha %.6g', boundary_max, alpha)
    return bounds


@dataclass
class MinimaxReport:
    c_estimate: float
    alpha: float
    boundary_max: float
    iteration_history: list
    best_map: AdmissibleMap
    argmax_node: int
    argmax_point: np.ndarray
    candidate_critical: np.ndarray
    grad_norm_at_candidate: float
    limiting_case: bool
    stop_reason: str
    limiting_regime: bool = False
    location_check: float = None
    sup_refinement_gap: float = 0.0
    sup_refined: float = None
    sup_converged: bool = True
    ps_trace: PalaisSmaleTrace = None
    ps_diagnosis: object = None
    deformation_eps: list = field(default_factory=list)

    def to_dict(self):
        return {'c_estimate': self.c_estimate, 'alpha': self.alpha, 'boundary_max': self.boundary_max,
                'iteration_history': [[int(k), float(v)] for k, v in self.iteration_history],
                'argmax_node': self.argmax_node, 'argmax_point': self.argmax_point.tolist(),
                'candidate_critical': self.candidate_critical.tolist(),
                'grad_norm_at_candidate': self.grad_norm_at_candidate, 'limiting_case': self.limiting_case,
                'limiting_regime': self.limiting_regime, 'stop_reason': self.stop_reason,
                'location_check': self.location_check, 'sup_refinement_gap': self.sup_refinement_gap,
                'sup_refined': self.sup_refined, 'sup_converged': self.sup_converged,
                'deformation_eps': list(self.deformation_eps),
                'ps_diagnosis': None if self.ps_diagnosis is None else self.ps_diagnosis.to_dict()}


def _polish(f: Functional, point: np.ndarray, radius: float) -> np.ndarray:
    solution = root(f.gradient, point, method='hybr', options={'xtol': 1e-14})
    if solution.success and np.all(np.isfinite(solution.x)) and np.linalg.norm(solution.x - point) <= radius \
            and f.gradient_norm(solution.x) <= f.gradient_norm(point):
        return solution.x
    return point


def estimate_cgamma(f: Functional, pair: LinkingPair, gamma0: AdmissibleMap = None, max_iters: int = 200,
                    b: float = 1e-3, tau_c: float = TAU_C, tau_b: float = 1e-8, tau_sup: float = 1e-6,
                    polish: bool = True) -> MinimaxReport:
    """
    Inf-max iteration gamma_{k+1} = eta_k(1, .) o gamma_k with eta_k the classical deformation at the
    current sup level, band half width (sup - alpha) / 2. Stops in the limiting case, when the band
    holds a near critical node, or when the deformation cannot be certified

    :param f:
    :param pair:
    :param gamma0: starting admissible map, default the identity of Q
    :param max_iters:
    :param b: gradient bound marking a near critical band
    :param tau_c: limiting case tolerance on c - alpha
    :param tau_sup: bisection of the argmax cells stops once it raises the sup by less than this
    :return:
    """
    bounds = check_geometry_bounds(f, pair, tau_b)
    if not bounds.holds:
        raise GeometryBoundsError('Boundary max %.6g > alpha %.6g: linking hypothesis fails'
                                  % (bounds.boundary_max, bounds.alpha))
    gamma = gamma0 if gamma0 is not None else AdmissibleMap.identity(pair)
    alpha = bounds.alpha
    value, node = sup_on_map(f, gamma)
    history = [(0, value)]
    trace = PalaisSmaleTrace()
    trace.append(f, gamma.node_images[node])
    eps_used = []
    regime = False
    stop_reason = 'max-iterations'
    for iteration in range(1, max_iters + 1):
        if value - alpha <= tau_c:
            stop_reason = 'limiting'
            break
        eps_bar = (value - alpha) / 2.0
        if bounds.boundary_max > value - eps_bar:
            regime = True
            logger.info('Boundary values reach the deformation band at level %.6g', value)
        try:
            deformation = classical_deform(f, value, eps_bar, gamma.node_images, b)
        except HypothesisError:
            stop_reason = 'near-critical'
            break
        except DeformationError as err:
            logger.info('Deformation exhausted at level %.6g: %s', value, err)
            stop_reason = 'deformation-exhausted'
            break
        gamma, drift = gamma.compose(lambda points: deformation.images)
        if drift > 0.0:
            regime = True
        new_value, node = sup_on_map(f, gamma)
        if new_value >= value:
            logger.warning('Sup %.6g did not decrease at a noncritical level', new_value)
            raise FlowStallError('Sup stalled at %.6g after deformation with eps %.3g' % (new_value, deformation.eps))
        value = new_value
        eps_used.append(deformation.eps)
        history.append((iteration, value))
        trace.append(f, gamma.node_images[node])
        logger.info('Iteration %d: sup %.8g, eps %.3g', iteration, value, deformation.eps)
    trace.level = value
    argmax_point = gamma.node_images[node].copy()
    spacing = float(np.max(np.linalg.norm(np.diff(gamma.node_images[pair.mesh.cells[:, :2]], axis=1), axis=-1)))
    candidate = _polish(f, argmax_point, 2.0 * spacing + 1e-12) if polish else argmax_point
    refined, divisions, converged = refine_sup(f, gamma, node, tau_sup)
    if not converged:
        logger.warning('Sup over the argmax cells still moves after %d divisions', divisions)
    elif refined - value >= tau_sup:
        logger.info('Cell bisection raises the sup by %.3g after %d divisions', refined - value, divisions)
    report = MinimaxReport(c_estimate=value, alpha=alpha, boundary_max=bounds.boundary_max,
                           iteration_history=history, best_map=gamma, argmax_node=node, argmax_point=argmax_point,
                           candidate_critical=candidate, grad_norm_at_candidate=float(f.gradient_norm(candidate)),
                           limiting_case=value - alpha <= tau_c, stop_reason=stop_reason, limiting_regime=regime,
                           location_check=float(pair.S.distance(candidate)),
                           sup_refinement_gap=max(0.0, refined - value), sup_refined=refined,
                           sup_converged=converged, ps_trace=trace,
                           ps_diagnosis=check_ps(f, trace, value), deformation_eps=eps_used)
    if report.c_estimate < alpha - tau_c:
        raise MinimaxError('Estimate %.6g fell below alpha %.6g' % (report.c_estimate, alpha))
    logger.info('c estimate %.8g after %d iterations (%s)', value, len(history) - 1, stop_reason)
    return report


@dataclass
class Localization:
    point: np.ndarray
    grad_norm: float
    dist_to_S: float
    f_value: float
    ekeland: LocalizedPoint

    def to_dict(self):
        return {'point': self.point.tolist(), 'grad_norm': self.grad_norm, 'dist_to_S': self.dist_to_S,
                'f_value': self.f_value, 'ekeland': self.ekeland.to_dict()}


def locate_on_S(report: MinimaxReport, pair: LinkingPair, f: Functional, tol: float = 1e-3, eps: float = None,
                weight: float = 1.0) -> Localization:
    """
    Critical point candidate on S in the limiting case: the localized point of the limiting case search,
    polished by minimizing |f'|^2 + weight dist(., S)^2

    :param report: minimax report with limiting_case set
    :param pair:
    :param f:
    :param tol: bound on |f'| and dist(., S) of the result
    :param eps: search scale, default min(0.1, 0.49 min(1, dist(dQ, S)))
    :return:
    """
    if not report.limiting_case:
        raise MinimaxError('Localization on S needs the limiting case (c - alpha = %.3g)'
                           % (report.c_estimate - report.alpha))
    eps = eps if eps is not None else min(0.1, 0.49 * min(1.0, pair.boundary_margin))
    localized = limiting_case_search(f, pair, report.best_map, eps, c=report.alpha)

    def objective(x):
        return float(np.sum(f.gradient(x) ** 2) + weight * pair.S.distance(x) ** 2)

    polished = minimize(objective, localized.x_eps, method='Nelder-Mead',
                        options={'xatol': 1e-12, 'fatol': 1e-24, 'maxiter': 20000})
    point = polished.x if objective(polished.x) <= objective(localized.x_eps) else localized.x_eps
    result = Localization(point=point, grad_norm=float(f.gradient_norm(point)),
                          dist_to_S=float(pair.S.distance(point)), f_value=float(f.value(point)), ekeland=localized)
    if result.grad_norm > tol or result.dist_to_S > tol:
        logger.warning('Localized point %s misses tol %.3g', point.tolist(), tol)
        raise MinimaxError('Localization failed: |f\'| = %.3g, dist to S = %.3g' % (result.grad_norm, result.dist_to_S))
    return result
