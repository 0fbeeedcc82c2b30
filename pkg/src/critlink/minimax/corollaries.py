__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

import logging

import numpy as np

from ..errors import CriticalPointError, MinimaxError
from ..functional import Functional, hessian_fd
from ..geometry import PathPair
from ..space import as_vector
from .driver import Localization, check_geometry_bounds, estimate_cgamma, locate_on_S

__all__ = ['check_strict_minimum', 'pucci_serrin_third', 'rabinowitz_sphere']

logger = logging.getLogger(__name__)


def check_strict_minimum(f: Functional, m, gradient_tol: float = 1e-8) -> np.ndarray:
    """Raise CriticalPointError unless m is critical with a positive definite finite difference Hessian"""
    m = as_vector(m, f.dimension)
    norm = f.gradient_norm(m)
    if norm > gradient_tol:
        raise CriticalPointError('%s is not critical: |f\'| = %.3g' % (m.tolist(), norm), point=m)
    eigenvalues = np.linalg.eigvalsh(hessian_fd(f, m))
    if eigenvalues[0] <= 0.0:
        raise CriticalPointError('%s is not a strict local minimum: Hessian eigenvalue %.3g'
                                 % (m.tolist(), eigenvalues[0]), point=m)
    return m


def pucci_serrin_third(f: Functional, m1, m2, tol: float = 1e-6, mesh_resolution: int = 64,
                       max_halvings: int = 20, max_iters: int = 200) -> np.ndarray:
    """
    Third critical point between two strict local minima: a mountain pass over paths from m1 to m2
    with S a sphere about m1, shrunk until f on S stays above both minima

    :param f:
    :param m1: strict local minimum
    :param m2: strict local minimum distinct from m1
    :param tol: separation below which points count as equal, and the gradient bound on the returned point
    :param mesh_resolution: path nodes - 1
    :param max_iters: minimax iterations
    :return: critical point candidate distinct from m1 and m2
    """
    m1 = check_strict_minimum(f, m1)
    m2 = check_strict_minimum(f, m2)
    if np.linalg.norm(m2 - m1) <= 10.0 * tol:
        raise MinimaxError('Minima %s and %s coincide' % (m1.tolist(), m2.tolist()))
    rho = float(np.linalg.norm(m2 - m1)) / 2.0
    floor = max(f.value(m1), f.value(m2))
    for _ in range(max_halvings):
        pair = PathPair(rho=rho, start=m1, end=m2, center=m1, mesh_resolution=mesh_resolution)
        bounds = check_geometry_bounds(f, pair)
        if bounds.alpha > floor:
            break
        logger.debug('inf of f on the sphere of radius %.3g is %.6g, not above %.6g', rho, bounds.alpha, floor)
        rho /= 2.0
    else:
        raise MinimaxError('No sphere about %s separates the minima levels' % m1.tolist())
    report = estimate_cgamma(f, pair, max_iters=max_iters)
    candidate = report.candidate_critical
    if report.grad_norm_at_candidate > tol:
        logger.warning('Minimax candidate %s is not critical: |f\'| = %.3g', candidate.tolist(),
                       report.grad_norm_at_candidate)
        raise MinimaxError('Candidate %s has |f\'| = %.3g above %.3g (%s)'
                           % (candidate.tolist(), report.grad_norm_at_candidate, tol, report.stop_reason))
    for m in (m1, m2):
        if np.linalg.norm(candidate - m) <= 10.0 * tol:
            raise MinimaxError('Minimax candidate %s collapses onto the minimum %s' % (candidate.tolist(), m.tolist()))
    logger.info('Third critical point %s at level %.8g (|f\'| %.3g)', candidate.tolist(), report.c_estimate,
                report.grad_norm_at_candidate)
    return candidate


def rabinowitz_sphere(f: Functional, e, r: float, mesh_resolution: int = 64, tol: float = 1e-3,
                      eps: float = None) -> Localization:
    """
    Critical point on the sphere S(0, r) when the mountain pass level over paths from 0 to e equals
    the inf of f on that sphere

    :param f:
    :param e: end point with |e| > r
    :param r: sphere radius
    :return: localization with |f'| and dist to the sphere within tol
    """
    pair = PathPair(rho=r, end=e, mesh_resolution=mesh_resolution)
    report = estimate_cgamma(f, pair)
    if not report.limiting_case:
        raise MinimaxError('Mountain pass level %.8g stays above the sphere level %.8g'
                           % (report.c_estimate, report.alpha))
    return locate_on_S(report, pair, f, tol=tol, eps=eps)
