__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import DeformationError, HypothesisError
from ..functional import Functional, pseudogradient_field
from ..space import SetDescriptor, FiniteSampleSet, sphere_directions
from .cutoffs import GapSet, cutoff_h, cutoff_rho
from .flow import rk4

__all__ = ['DeformationConfig', 'FlowField', 'build_field', 'set_points']

logger = logging.getLogger(__name__)


@dataclass
class DeformationConfig:
    """
    :param c: target level
    :param eps_bar: half width of the value band where the field acts
    :param delta: width of the neighbourhood of E where the field acts
    :param b: lower bound demanded of |f'| on the sampled band around E
    :param ode_step: initial RK4 step
    :param max_steps: step count at which integration is reported as stalled
    """
    c: float
    eps_bar: float
    delta: float
    b: float = 1e-3
    ode_step: float = 1.0 / 64
    max_steps: int = 4096
    tau_flow: float = 1e-6
    samples: int = 1000
    halvings: int = 5
    seed: int = 0

    def validate(self):
        for name in ('eps_bar', 'delta', 'b', 'ode_step', 'tau_flow'):
            if not getattr(self, name) > 0.0:
                raise DeformationError('Deformation parameter %s must be positive, got %r'
                                       % (name, getattr(self, name)))
        if self.max_steps < 1 or self.samples < 1:
            raise DeformationError('max_steps and samples must be positive')

    @property
    def initial_steps(self) -> int:
        return max(1, int(round(1.0 / self.ode_step)))

    def to_dict(self):
        return dict(self.__dict__)


def set_points(descriptor: SetDescriptor, resolution: int = 64, radius: float = 10.0) -> np.ndarray:
    if descriptor is None:
        return np.zeros((0, 0))
    if isinstance(descriptor, FiniteSampleSet):
        return descriptor.points
    return descriptor.sample(resolution, radius)


def _ball_offsets(n: int, count: int, radius: float, rng) -> np.ndarray:
    directions = sphere_directions(n, count, rng) if n > 1 else rng.choice([-1.0, 1.0], (count, 1))
    return directions * radius * rng.random((len(directions), 1)) ** (1.0 / n)


class FlowField:
    """
    Cut off negative pseudogradient field acting near E in the value band around c, switched off on
    the set D1 of points at least as close to D as to the flow envelope E1 of E
    X1 = -(delta / 3) h rho(|W|) W and X = q X1
    """

    def __init__(self, f: Functional, D: SetDescriptor, E: SetDescriptor, config: DeformationConfig):
        self.f = f
        self.D = D
        self.E = E
        self.config = config
        self.n = f.dimension
        self.scale = 1.0
        self.A1 = GapSet(self.n, self._gap_a1, 'A1')
        self.A2 = GapSet(self.n, self._gap_a2, 'A2')
        self.E1 = None
        self.tube = 0.0
        self.D1 = GapSet(self.n, self._gap_d1, 'D1')
        self.lipschitz_estimate = None

    def _band(self, x):
        return np.abs(self.f._value(x) - self.config.c)

    def _gap_a2(self, x):
        delta, eps_bar = self.config.delta, self.config.eps_bar
        return np.maximum(np.maximum(self.E._distance(x) - delta / 3.0, 0.0),
                          np.maximum(self._band(x) - eps_bar / 3.0, 0.0) / self.scale)

    def _gap_a1(self, x):
        delta, eps_bar = self.config.delta, self.config.eps_bar
        inside = np.minimum(delta / 2.0 - self.E._distance(x), (eps_bar / 2.0 - self._band(x)) / self.scale)
        return np.maximum(inside, 0.0)

    def _raw_envelope_distance(self, x):
        flat = np.asarray(x, dtype=float).reshape(-1, self.n)
        return cdist(flat, self.E1).min(axis=1).reshape(np.shape(x)[:-1])

    def distance_to_envelope(self, x):
        return np.maximum(self._raw_envelope_distance(x) - self.tube, 0.0)

    def _gap_d1(self, x):
        if self.D is None:
            return np.ones(np.shape(x)[:-1])
        return np.maximum(self.D._distance(x) - self._raw_envelope_distance(x), 0.0) / 2.0

    def h(self, x):
        return cutoff_h(x, self.A1, self.A2)

    def q(self, x):
        x = np.asarray(x, dtype=float)
        if self.D is None or self.E1 is None:
            return np.ones(x.shape[:-1]) if x.ndim > 1 else 1.0
        outside = self._gap_d1(x)
        total = outside + self.distance_to_envelope(x)
        return np.divide(outside, total, out=np.zeros_like(outside), where=total > 0.0)

    def field_one(self, x) -> np.ndarray:
        """X1, bounded by delta / 3"""
        x = np.asarray(x, dtype=float)
        w = pseudogradient_field(self.f, x)
        norms = np.linalg.norm(w, axis=-1)
        weight = np.asarray(cutoff_h(x, self.A1, self.A2)) * np.asarray(cutoff_rho(norms))
        return -(self.config.delta / 3.0) * weight[..., None] * w

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.asarray(self.q(x))[..., None] * self.field_one(x)

    def envelope(self, starts: np.ndarray, steps: int):
        """E1 as the points of the X1 trajectories of the E sample, tube radius half the step spacing"""
        trajectory = rk4(self.field_one, starts, 1.0, steps)
        points = trajectory.points.reshape(-1, self.n)
        spacing = np.linalg.norm(np.diff(trajectory.points, axis=0), axis=-1)
        self.E1 = points
        self.tube = 0.5 * float(np.max(spacing)) if spacing.size else 0.0

    def to_dict(self):
        return {'config': self.config.to_dict(), 'scale': self.scale, 'tube': self.tube,
                'envelope_points': 0 if self.E1 is None else len(self.E1),
                'lipschitz_estimate': self.lipschitz_estimate}


def build_field(f: Functional, D: SetDescriptor, E: SetDescriptor, config: DeformationConfig,
                rng=None) -> FlowField:
    """
    Construct the deformation field after checking the hypotheses on samples: D and E disjoint with
    delta at most dist(D, E) / 3, f <= c on E and f >= c on D, and |f'| >= b on the sampled set
    A = N_delta(E) intersected with the band |f - c| <= eps_bar

    :param f:
    :param D: set kept fixed, or None
    :param E: set pushed below c
    :param config:
    :param rng: numpy Generator for the verification samples, default seeded from config
    :return:
    """
    config.validate()
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    c, eps_bar, delta = config.c, config.eps_bar, config.delta
    e_points = set_points(E)
    d_points = set_points(D)
    if len(d_points):
        gap = float(np.min(cdist(d_points, e_points)))
        if gap <= 0.0:
            logger.warning('D and E intersect')
            raise HypothesisError('D and E intersect', point=d_points[np.argmin(cdist(d_points, e_points).min(1))])
        if delta >= gap:
            logger.warning('delta %g reaches D from E (dist %g)', delta, gap)
            raise HypothesisError('delta = %g is not below dist(D, E) = %g' % (delta, gap))
        if delta > gap / 3.0 * (1.0 + 1e-12):
            logger.warning('delta %g exceeds dist(D, E) / 3 = %g', delta, gap / 3.0)
        low = f._value(d_points)
        if np.min(low) < c - 1e-12:
            worst = d_points[int(np.argmin(low))]
            logger.warning('f < c on D at %s', worst.tolist())
            raise HypothesisError('f(D) >= c violated (min %.6g < %.6g)' % (np.min(low), c), point=worst)
    high = f._value(e_points)
    if not np.all(f.in_sublevel(e_points, c + 1e-12)):
        worst = e_points[int(np.argmax(high))]
        logger.warning('f > c on E at %s', worst.tolist())
        raise HypothesisError('f(E) <= c violated (max %.6g > %.6g)' % (np.max(high), c), point=worst)

    per_point = max(1, config.samples // max(1, len(e_points)))
    neighbourhood = (e_points[:, None, :] + _ball_offsets(f.dimension, per_point, delta, rng)[None, :, :])
    neighbourhood = np.vstack([e_points, neighbourhood.reshape(-1, f.dimension)])
    band = neighbourhood[f.in_band(neighbourhood, c - eps_bar, c + eps_bar)]
    field = FlowField(f, D, E, config)
    if len(band):
        norms = f.gradient_norm(band)
        if np.min(norms) < config.b:
            worst = band[int(np.argmin(norms))]
            logger.warning('|f\'| = %.3g < b = %.3g at %s', np.min(norms), config.b, worst.tolist())
            raise HypothesisError('Gradient bound b violated on A: |f\'(%s)| = %.3g'
                                  % (worst.tolist(), np.min(norms)), point=worst)
        field.scale = max(1.0, float(np.max(norms)))
    field.envelope(e_points, config.initial_steps)
    _verify(field, neighbourhood, d_points, rng)
    logger.info('Field built: %d band samples, envelope of %d points, tube %.3g', len(band), len(field.E1),
                field.tube)
    return field


def _verify(field: FlowField, neighbourhood: np.ndarray, d_points: np.ndarray, rng):
    config = field.config
    count = max(config.samples, 1000)
    low = neighbourhood.min(axis=0) - config.delta
    high = neighbourhood.max(axis=0) + config.delta
    box = low + (high - low) * rng.random((count, field.n))
    samples = np.vstack([box, neighbourhood] + ([d_points] if len(d_points) else []))
    values = field(samples)
    norms = np.linalg.norm(values, axis=-1)
    if np.max(norms) > config.delta / 3.0 * (1.0 + 1e-12):
        raise DeformationError('Field norm %.6g exceeds delta / 3' % np.max(norms))
    outside = field.E._distance(samples) > config.delta
    if np.any(norms[outside] != 0.0):
        raise DeformationError('Field is nonzero outside N_delta(E)')
    if field.D is not None and np.any(norms[field.D1.contains(samples)] != 0.0):
        raise DeformationError('Field is nonzero on D1')
    step = 1e-6 * rng.standard_normal(samples.shape)
    moved = np.linalg.norm(field(samples + step) - values, axis=-1)
    field.lipschitz_estimate = float(np.max(moved / np.linalg.norm(step, axis=-1)))
    if not np.isfinite(field.lipschitz_estimate):
        raise DeformationError('Field Lipschitz estimate is not finite')
