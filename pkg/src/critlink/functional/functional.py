__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

import logging
from abc import ABC, abstractmethod

import numpy as np

from ..errors import FunctionalError, CriticalPointError
from ..space import as_vector

__all__ = ['Functional', 'CallableFunctional', 'DoubleWell', 'Saddle', 'Exp1d', 'RadialPlateau', 'BvpQuartic',
           'Constant', 'NegNormSquared', 'MuellerBrown', 'update_functional_dictionary', 'make_test_functional',
           'pseudogradient', 'pseudogradient_field', 'check_gradient', 'hessian_fd']

logger = logging.getLogger(__name__)


def _scalar(values):
    values = np.asarray(values, dtype=float)
    return float(values) if values.ndim == 0 else values


class Functional(ABC):
    """
    Abstract Base Class for C1 functionals on R^n. Subclasses evaluate value and gradient on arrays of
    shape (..., n) so that mesh nodes and flow batches are evaluated in one call. Library subclasses
    return their registry name from functional_name and are collected by update_functional_dictionary
    """

    @staticmethod
    @abstractmethod
    def functional_name() -> str:
        """pass"""

    def __init__(self, dimension: int):
        if int(dimension) < 1:
            raise FunctionalError('Dimension must be at least 1, got %r' % (dimension,))
        self.dimension = int(dimension)
        self.name = self.functional_name()
        self.params = {}

    @abstractmethod
    def _value(self, x: np.ndarray) -> np.ndarray:
        """pass"""

    @abstractmethod
    def _gradient(self, x: np.ndarray) -> np.ndarray:
        """pass"""

    @property
    def known_critical_points(self):
        """List of (point, level) pairs known in closed form"""
        return []

    def value(self, x):
        return _scalar(self._value(as_vector(x, self.dimension)))

    def gradient(self, x) -> np.ndarray:
        return self._gradient(as_vector(x, self.dimension))

    def gradient_norm(self, x):
        return _scalar(np.linalg.norm(self.gradient(x), axis=-1))

    def in_sublevel(self, x, level: float):
        return np.asarray(self._value(as_vector(x, self.dimension))) <= level

    def in_band(self, x, low: float, high: float):
        values = np.asarray(self._value(as_vector(x, self.dimension)))
        return (values >= low) & (values <= high)

    def __call__(self, x):
        return self.value(x)

    def __repr__(self):
        arguments = ', '.join('%s=%r' % item for item in sorted(self.params.items()))
        return '%s(%s)' % (self.name, arguments)


class CallableFunctional(Functional):
    """Wraps plain value and gradient callables working on (..., n) arrays"""

    @staticmethod
    def functional_name() -> str:
        return ''

    def __init__(self, value, gradient, dimension: int, name: str = 'callable', critical_points=None):
        super().__init__(dimension)
        self.name = name
        self._value_map = value
        self._gradient_map = gradient
        self._critical_points = list(critical_points or [])

    @property
    def known_critical_points(self):
        return [(as_vector(point), float(level)) for point, level in self._critical_points]

    def _value(self, x):
        return np.asarray(self._value_map(x), dtype=float)

    def _gradient(self, x):
        return np.asarray(self._gradient_map(x), dtype=float)


class DoubleWell(Functional):
    """
    x^4 - 2x^2 + |y|^2 + shift in coordinates (x, y) with y the trailing dim - 1 coordinates.
    shift=1 gives (x^2 - 1)^2 + |y|^2
    """

    @staticmethod
    def functional_name() -> str:
        return 'double_well'

    def __init__(self, dim: int = 2, shift: float = 0.0):
        super().__init__(dim)
        self.shift = float(shift)
        self.params = {'dim': self.dimension, 'shift': self.shift}

    def _value(self, x):
        first = x[..., 0]
        return first ** 4 - 2.0 * first ** 2 + np.sum(x[..., 1:] ** 2, axis=-1) + self.shift

    def _gradient(self, x):
        first = x[..., :1]
        return np.concatenate([4.0 * first ** 3 - 4.0 * first, 2.0 * x[..., 1:]], axis=-1)

    @property
    def known_critical_points(self):
        points = []
        for first, level in ((0.0, 0.0), (1.0, -1.0), (-1.0, -1.0)):
            point = np.zeros(self.dimension)
            point[0] = first
            points.append((point, level + self.shift))
        return points


class Saddle(Functional):
    """Sum of squares of the first split coordinates minus the sum of squares of the rest"""

    @staticmethod
    def functional_name() -> str:
        return 'saddle'

    def __init__(self, dim: int = 2, split: int = 1):
        super().__init__(dim)
        if not 0 <= int(split) <= self.dimension:
            raise FunctionalError('split must lie in [0, %d], got %r' % (self.dimension, split))
        self.split = int(split)
        self.params = {'dim': self.dimension, 'split': self.split}
        self._signs = np.where(np.arange(self.dimension) < self.split, 1.0, -1.0)

    def _value(self, x):
        return np.sum(self._signs * x ** 2, axis=-1)

    def _gradient(self, x):
        return 2.0 * self._signs * x

    @property
    def known_critical_points(self):
        return [(np.zeros(self.dimension), 0.0)]


class Exp1d(Functional):
    @staticmethod
    def functional_name() -> str:
        return 'exp1d'

    def __init__(self):
        super().__init__(1)

    def _value(self, x):
        return np.exp(x[..., 0])

    def _gradient(self, x):
        return np.exp(x)


class RadialPlateau(Functional):
    """
    max(0, |x| - radius)^2. C1 with the closed ball of the given radius as its critical set, which
    makes it the standard instance where the minimax level equals the bound on the linking set
    """

    @staticmethod
    def functional_name() -> str:
        return 'radial_plateau'

    def __init__(self, dim: int = 2, radius: float = 1.0):
        super().__init__(dim)
        if radius < 0.0:
            raise FunctionalError('Plateau radius must be nonnegative, got %g' % radius)
        self.radius = float(radius)
        self.params = {'dim': self.dimension, 'radius': self.radius}

    def _value(self, x):
        return np.maximum(0.0, np.linalg.norm(x, axis=-1) - self.radius) ** 2

    def _gradient(self, x):
        norm = np.linalg.norm(x, axis=-1, keepdims=True)
        gap = np.maximum(0.0, norm - self.radius)
        return 2.0 * gap * x / np.where(norm > 0.0, norm, 1.0)

    @property
    def known_critical_points(self):
        return [(np.zeros(self.dimension), 0.0)]


class BvpQuartic(Functional):
    """
    Discrete energy of -u'' = u^3 on (0, length) with u = 0 at both ends, on m grid intervals.
    Unknowns are the m - 1 interior values and h = length / m

    Phi(u) = 1/2 sum ((u_{i+1} - u_i) / h)^2 h - 1/4 sum u_i^4 h
    """

    @staticmethod
    def functional_name() -> str:
        return 'bvp_quartic'

    def __init__(self, m: int = 32, length: float = 1.0):
        if int(m) != m or int(m) < 2:
            raise FunctionalError('bvp_quartic needs an integer grid size m >= 2, got %r' % (m,))
        if length <= 0.0:
            raise FunctionalError('bvp_quartic needs a positive interval length, got %r' % (length,))
        super().__init__(int(m) - 1)
        self.m = int(m)
        self.length = float(length)
        self.h = self.length / self.m
        self.params = {'m': self.m, 'length': self.length}

    def _padded(self, u):
        zeros = np.zeros(u.shape[:-1] + (1,))
        return np.concatenate([zeros, u, zeros], axis=-1)

    def _value(self, u):
        slopes = np.diff(self._padded(u), axis=-1) / self.h
        return 0.5 * np.sum(slopes ** 2, axis=-1) * self.h - 0.25 * np.sum(u ** 4, axis=-1) * self.h

    def _gradient(self, u):
        padded = self._padded(u)
        laplacian = (2.0 * padded[..., 1:-1] - padded[..., :-2] - padded[..., 2:]) / self.h ** 2
        return (laplacian - u ** 3) * self.h

    @property
    def known_critical_points(self):
        return [(np.zeros(self.dimension), 0.0)]


class Constant(Functional):
    @staticmethod
    def functional_name() -> str:
        return 'constant'

    def __init__(self, dim: int = 2, level: float = 0.0):
        super().__init__(dim)
        self.level = float(level)
        self.params = {'dim': self.dimension, 'level': self.level}

    def _value(self, x):
        return np.full(x.shape[:-1], self.level)

    def _gradient(self, x):
        return np.zeros_like(x)


class NegNormSquared(Functional):
    @staticmethod
    def functional_name() -> str:
        return 'neg_norm_squared'

    def __init__(self, dim: int = 2):
        super().__init__(dim)
        self.params = {'dim': self.dimension}

    def _value(self, x):
        return -np.sum(x ** 2, axis=-1)

    def _gradient(self, x):
        return -2.0 * x

    @property
    def known_critical_points(self):
        return [(np.zeros(self.dimension), 0.0)]


class MuellerBrown(Functional):
    """
    Mueller-Brown surface, the two dimensional benchmark of string and mountain pass methods.
    Minima near (-0.558, 1.442), (0.623, 0.028), (-0.050, 0.467); saddles only known numerically
    """
    AA = np.array([-200.0, -100.0, -170.0, 15.0])
    aa = np.array([-1.0, -1.0, -6.5, 0.7])
    bb = np.array([0.0, 0.0, 11.0, 0.6])
    cc = np.array([-10.0, -10.0, -6.5, 0.7])
    xx = np.array([1.0, 0.0, -0.5, -1.0])
    yy = np.array([0.0, 0.5, 1.5, 1.0])

    @staticmethod
    def functional_name() -> str:
        return 'mueller_brown'

    def __init__(self):
        super().__init__(2)

    def _terms(self, v):
        dx = v[..., 0, None] - self.xx
        dy = v[..., 1, None] - self.yy
        exponent = self.AA * np.exp(self.aa * dx ** 2 + self.bb * dx * dy + self.cc * dy ** 2)
        return dx, dy, exponent

    def _value(self, v):
        return np.sum(self._terms(v)[2], axis=-1)

    def _gradient(self, v):
        dx, dy, exponent = self._terms(v)
        dfdx = np.sum((2.0 * self.aa * dx + self.bb * dy) * exponent, axis=-1)
        dfdy = np.sum((2.0 * self.cc * dy + self.bb * dx) * exponent, axis=-1)
        return np.stack([dfdx, dfdy], axis=-1)


def update_functional_dictionary(functional_dictionary):
    """
    Collects every library functional, keyed by its registry name

    :param functional_dictionary:
    :return:
    """
    for sub_class in Functional.__subclasses__():
        if sub_class.functional_name():
            functional_dictionary.update({sub_class.functional_name(): sub_class})


def make_test_functional(name: str, params=None) -> Functional:
    library = {}
    update_functional_dictionary(library)
    if name not in library:
        raise FunctionalError('Unknown functional %r, known: %s' % (name, ', '.join(sorted(library))))
    try:
        return library[name](**dict(params or {}))
    except TypeError as err:
        raise FunctionalError('Invalid parameters for %s: %s' % (name, err)) from err


def pseudogradient(f: Functional, x, critical_tolerance: float = 1e-12) -> np.ndarray:
    """
    Pseudogradient vector W(x) with |W| <= 2|f'| and <f', W> >= |f'|^2; the gradient itself

    :param f:
    :param x: a non-critical point
    :param critical_tolerance: gradient norms at or below this reject x as critical
    :return:
    """
    gradient = f.gradient(x)
    norm = float(np.linalg.norm(gradient))
    if norm <= critical_tolerance:
        logger.warning('Pseudogradient requested at critical point %s of %s', np.asarray(x).tolist(), f.name)
        raise CriticalPointError('%s is critical for %s (|f\'| = %.3g)' % (np.asarray(x).tolist(), f.name, norm),
                                 point=np.asarray(x, dtype=float))
    return gradient


def pseudogradient_field(f: Functional, points: np.ndarray) -> np.ndarray:
    """Batched W for flows; vanishes exactly where the gradient does"""
    return f.gradient(points)


def check_gradient(f: Functional, points, step: float = 1e-5) -> float:
    """
    Largest scale adjusted relative error between the gradient and central differences of the value

    :param f:
    :param points: m x n array
    :param step: base step, multiplied by max(1, |x_i|) per coordinate
    :return:
    """
    points = np.atleast_2d(as_vector(points, f.dimension))
    steps = step * np.maximum(1.0, np.abs(points))
    shifts = np.eye(f.dimension)[None, :, :] * steps[:, :, None]
    forward = f._value(points[:, None, :] + shifts)
    backward = f._value(points[:, None, :] - shifts)
    differences = (forward - backward) / (2.0 * steps)
    gradients = f.gradient(points)
    errors = np.linalg.norm(gradients - differences, axis=-1) / np.maximum(1.0, np.linalg.norm(gradients, axis=-1))
    return float(np.max(errors))


def hessian_fd(f: Functional, x, step: float = 1e-5) -> np.ndarray:
    x = as_vector(x, f.dimension)
    shifts = np.eye(f.dimension) * step
    forward = f.gradient(x + shifts)
    backward = f.gradient(x - shifts)
    hessian = (forward - backward) / (2.0 * step)
    return 0.5 * (hessian + hessian.T)
