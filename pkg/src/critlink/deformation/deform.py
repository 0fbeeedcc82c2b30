__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import DeformationError, HypothesisError
from ..functional import Functional, pseudogradient_field
from ..space import SetDescriptor
from .cutoffs import GapSet, cutoff_h
from .field import DeformationConfig, FlowField, build_field, set_points, _ball_offsets
from .flow import Trajectory, flow

__all__ = ['DeformationResult', 'ClassicalField', 'ClassicalDeformation', 'deform', 'classical_deform']

logger = logging.getLogger(__name__)


@dataclass
class DeformationResult:
    """The flow eta with the sampled evidence for its four properties"""
    eps: float
    field: FlowField
    reversibility_error: float
    monotonicity_violations: int
    fixed_drift: float
    e_value_max: float
    halvings: int
    starts: np.ndarray = None
    trajectory: Trajectory = None

    def eta(self, x, t: float = 1.0) -> np.ndarray:
        config = self.field.config
        return flow(self.field, x, t, config.initial_steps, config.max_steps).endpoint

    def to_dict(self):
        return {'eps': self.eps, 'reversibility_error': self.reversibility_error,
                'monotonicity_violations': self.monotonicity_violations, 'fixed_drift': self.fixed_drift,
                'e_value_max': self.e_value_max, 'halvings': self.halvings, 'field': self.field.to_dict()}


def deform(f: Functional, D: SetDescriptor, E: SetDescriptor, c: float, config: DeformationConfig,
           starts: int = 200, rng=None) -> DeformationResult:
    """
    Deformation at level c: a flow eta fixing D, nonincreasing in f, invertible, and carrying E below
    c - eps. The field is built by build_field; the properties are verified on E, D and seeded
    starting points near E, halving eps until f(eta(1, E)) <= c - eps holds

    :param f:
    :param D: set kept fixed, or None
    :param E: set pushed down
    :param c: level
    :param config: DeformationConfig, its c is replaced by the given level
    :param starts: random verification starts around E
    :param rng: numpy Generator
    :return:
    """
    config = DeformationConfig(**{**config.to_dict(), 'c': float(c)})
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    field = build_field(f, D, E, config, rng)
    e_points = set_points(E)
    d_points = set_points(D)
    picks = rng.integers(0, len(e_points), starts)
    samples = e_points[picks] + _ball_offsets(f.dimension, starts, config.delta, rng)
    samples = np.vstack([e_points, samples] + ([d_points] if len(d_points) else []))

    forward = flow(field, samples, 1.0, config.initial_steps, config.max_steps)
    backward = flow(field, forward.endpoint, -1.0, config.initial_steps, config.max_steps)
    reversibility = float(np.max(np.linalg.norm(backward.endpoint - samples, axis=-1)))
    values = forward.values(f)
    violations = int(np.sum(np.diff(values, axis=0) > 1e-10))
    drift = 0.0
    if len(d_points):
        if np.any(field(d_points) != 0.0):
            raise DeformationError('Field does not vanish on D')
        drift = float(np.max(np.abs(forward.endpoint[-len(d_points):] - d_points)))
    if reversibility > config.tau_flow:
        logger.warning('Reverse flow misses the starts by %.3g', reversibility)
        raise DeformationError('Reversibility error %.3g exceeds %.3g' % (reversibility, config.tau_flow))
    if violations:
        logger.warning('%d monotonicity violations along the flow', violations)
        raise DeformationError('f increased along %d flow steps' % violations)
    if drift != 0.0:
        raise DeformationError('Points of D moved by %.3g' % drift)

    e_value_max = float(np.max(values[-1, :len(e_points)]))
    eps = config.eps_bar / 3.0
    for halving in range(config.halvings + 1):
        if e_value_max <= config.c - eps:
            logger.info('Deformation at level %g: eps = %.4g after %d halvings', config.c, eps, halving)
            return DeformationResult(eps=eps, field=field, reversibility_error=reversibility,
                                     monotonicity_violations=violations, fixed_drift=drift,
                                     e_value_max=e_value_max, halvings=halving, starts=samples,
                                     trajectory=forward)
        logger.debug('f(eta(1, E)) = %.6g > c - eps = %.6g, halving eps', e_value_max, config.c - eps)
        eps /= 2.0
    logger.warning('E not pushed below c - eps after %d halvings', config.halvings)
    raise DeformationError('f(eta(1, E)) = %.6g stays above c - eps for eps down to %.3g'
                           % (e_value_max, 2.0 * eps))


class ClassicalField:
    """-T h(x) rho(|W|) W with h switching from 0 on {|f - c| >= eps_bar} to 1 on {|f - c| <= eps_bar / 2}"""

    def __init__(self, f: Functional, c: float, eps_bar: float, T: float):
        self.f = f
        self.c = c
        self.eps_bar = eps_bar
        self.T = T
        self.A1 = GapSet(f.dimension, lambda x: np.maximum(eps_bar - self._band(x), 0.0), 'outside band')
        self.A2 = GapSet(f.dimension, lambda x: np.maximum(self._band(x) - eps_bar / 2.0, 0.0), 'inner band')

    def _band(self, x):
        return np.abs(self.f._value(x) - self.c)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        w = pseudogradient_field(self.f, x)
        weight = np.asarray(cutoff_h(x, self.A1, self.A2)) / np.maximum(1.0, np.linalg.norm(w, axis=-1))
        return -self.T * weight[..., None] * w


@dataclass
class ClassicalDeformation:
    eps: float
    field: ClassicalField
    min_gradient: float
    images: np.ndarray
    halvings: int
    initial_steps: int = 64
    max_steps: int = 4096

    def eta(self, x, t: float = 1.0) -> np.ndarray:
        return flow(self.field, x, t, self.initial_steps, self.max_steps).endpoint

    def to_dict(self):
        return {'eps': self.eps, 'T': self.field.T, 'min_gradient': self.min_gradient, 'halvings': self.halvings}


def classical_deform(f: Functional, c: float, eps_bar: float, sample, b: float = 1e-3, T_max: float = 50.0,
                     halvings: int = 5, initial_steps: int = 64, max_steps: int = 4096) -> ClassicalDeformation:
    """
    Deformation at a noncritical level: every sampled point with f <= c + eps ends below c - eps.
    Refused when a sampled point of the band |f - c| <= eps_bar has |f'| < b

    :param f:
    :param c: level
    :param eps_bar: band half width
    :param sample: m x n points to deform, e.g. the node images of a map
    :param b: gradient bound on the band
    :param T_max: cap on the flow time scale
    :return:
    """
    if eps_bar <= 0.0:
        raise DeformationError('eps_bar must be positive, got %g' % eps_bar)
    sample = np.atleast_2d(np.asarray(sample, dtype=float))
    values = f._value(sample)
    band = sample[np.abs(values - c) <= eps_bar]
    min_gradient = np.inf
    if len(band):
        norms = f.gradient_norm(band)
        min_gradient = float(np.min(norms))
        if min_gradient < b:
            worst = band[int(np.argmin(norms))]
            logger.info('Level %.6g is near critical: |f\'| = %.3g at %s', c, min_gradient, worst.tolist())
            raise HypothesisError('Band around %.6g holds a near critical point, |f\'| = %.3g < %.3g'
                                  % (c, min_gradient, b), point=worst)
    T = 1.0 if not np.isfinite(min_gradient) else float(np.clip(eps_bar / min_gradient ** 2, 1.0, T_max))
    field = ClassicalField(f, c, eps_bar, T)
    images = flow(field, sample, 1.0, initial_steps, max_steps).endpoint
    moved = f._value(images)
    eps = eps_bar / 3.0
    for halving in range(halvings + 1):
        covered = values <= c + eps
        if not np.any(covered) or np.max(moved[covered]) <= c - eps:
            logger.debug('Classical deformation at %.6g: eps = %.4g, T = %.3g', c, eps, T)
            return ClassicalDeformation(eps=eps, field=field, min_gradient=min_gradient, images=images,
                                        halvings=halving, initial_steps=initial_steps, max_steps=max_steps)
        eps /= 2.0
    logger.warning('Classical deformation at %.6g failed after %d halvings', c, halvings)
    raise DeformationError('Sampled sublevel c + eps not carried below c - eps at level %.6g' % c)
