__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

from abc import ABC, abstractmethod

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import SpaceError
from .decomposition import as_vector

__all__ = ['TAU_SET', 'SetDescriptor', 'SubspaceSet', 'SphereSet', 'BallExteriorSet', 'FiniteSampleSet',
           'CompositeSet', 'dist_to_set', 'sphere_directions']

TAU_SET = 1e-9


def _scalar(values):
    values = np.asarray(values, dtype=float)
    return float(values) if values.ndim == 0 else values


def _orthonormal(basis, n) -> np.ndarray:
    if basis is None:
        return np.eye(n)
    basis = np.asarray(basis, dtype=float)
    if basis.ndim == 1:
        basis = basis.reshape(n, 1)
    if basis.shape[0] != n:
        raise SpaceError('Basis rows %d do not match dimension %d' % (basis.shape[0], n))
    if basis.shape[1] and np.max(np.abs(basis.T @ basis - np.eye(basis.shape[1]))) > 1e-8:
        raise SpaceError('Set basis must have orthonormal columns')
    return basis


def sphere_directions(k: int, count: int, rng=None) -> np.ndarray:
    """
    Deterministic directions on the unit sphere of R^k. Circles use equally spaced angles starting
    at zero, two-spheres a Fibonacci lattice; higher dimensions fall back to normalized Gaussian draws

    :param k: ambient dimension of the sphere
    :param count: requested number of directions
    :param rng: numpy Generator for k > 3
    :return: count x k array
    """
    if k == 1:
        return np.array([[1.0], [-1.0]])
    if k == 2:
        angles = np.linspace(0.0, 2.0 * np.pi, count, endpoint=False)
        return np.column_stack([np.cos(angles), np.sin(angles)])
    if k == 3:
        index = np.arange(count) + 0.5
        polar = np.arccos(1.0 - 2.0 * index / count)
        azimuth = np.pi * (1.0 + 5.0 ** 0.5) * index
        return np.column_stack([np.cos(azimuth) * np.sin(polar), np.sin(azimuth) * np.sin(polar), np.cos(polar)])
    rng = rng if rng is not None else np.random.default_rng(0)
    draws = rng.standard_normal((count, k))
    return draws / np.linalg.norm(draws, axis=1, keepdims=True)


def _ball_grid(k: int, resolution: int, radius: float, rng=None) -> np.ndarray:
    if k == 0:
        return np.zeros((1, 0))
    if k <= 3:
        axis = np.linspace(-radius, radius, resolution if resolution % 2 else resolution + 1)
        grid = np.stack(np.meshgrid(*([axis] * k), indexing='ij'), axis=-1).reshape(-1, k)
        return grid[np.linalg.norm(grid, axis=1) <= radius * (1.0 + 1e-12)]
    rng = rng if rng is not None else np.random.default_rng(0)
    directions = sphere_directions(k, resolution ** 2, rng)
    radii = radius * rng.random(len(directions)) ** (1.0 / k)
    return np.vstack([np.zeros((1, k)), directions * radii[:, None]])


class SetDescriptor(ABC):
    """
    Closed subset of R^n known through its distance function. Membership is distance zero up to
    the tolerance, and all distances are vectorized over leading axes
    """
    kind = ''

    def __init__(self, n: int, tolerance: float = TAU_SET):
        self.n = n
        self.tolerance = tolerance

    @abstractmethod
    def _distance(self, v: np.ndarray) -> np.ndarray:
        """Distance for an array of shape (..., n)"""

    @abstractmethod
    def sample(self, resolution: int = 64, radius: float = 10.0, rng=None) -> np.ndarray:
        """Finite sample of the set, unbounded sets cut at the given radius"""

    def distance(self, v):
        return _scalar(self._distance(as_vector(v, self.n)))

    def contains(self, v):
        membership = np.asarray(self._distance(as_vector(v, self.n))) <= self.tolerance
        return bool(membership) if membership.ndim == 0 else membership

    def distance_gradient(self, v, step: float = 1e-7) -> np.ndarray:
        """Central difference gradient of the distance, a unit vector away from the set off the set"""
        v = as_vector(v, self.n)
        shifts = np.eye(self.n) * step
        forward = self._distance(v[..., None, :] + shifts)
        backward = self._distance(v[..., None, :] - shifts)
        return (forward - backward) / (2.0 * step)

    def __repr__(self):
        return '%s(kind=%s, n=%d)' % (self.__class__.__name__, self.kind, self.n)


class SubspaceSet(SetDescriptor):
    """Affine subspace center + span(basis)"""
    kind = 'subspace'

    def __init__(self, basis, center=None, tolerance: float = TAU_SET, n: int = None):
        basis = np.asarray(basis, dtype=float)
        n = n if n is not None else basis.shape[0]
        super().__init__(n, tolerance)
        self.basis = np.zeros((n, 0)) if basis.size == 0 else _orthonormal(basis, n)
        self.center = np.zeros(n) if center is None else as_vector(center, n)

    def _distance(self, v):
        w = v - self.center
        return np.linalg.norm(w - (w @ self.basis) @ self.basis.T, axis=-1)

    def sample(self, resolution=64, radius=10.0, rng=None):
        coords = _ball_grid(self.basis.shape[1], resolution, radius, rng)
        return self.center + coords @ self.basis.T


class SphereSet(SetDescriptor):
    """
    Sphere of the given radius about center. With a basis the sphere lives inside the affine subspace
    center + span(basis); with half_axis only the closed half {<x - center, half_axis> >= 0} is kept
    """
    kind = 'sphere'

    def __init__(self, center, radius: float, basis=None, half_axis=None, tolerance: float = TAU_SET):
        center = as_vector(center)
        super().__init__(center.size, tolerance)
        if radius <= 0.0:
            raise SpaceError('Sphere radius must be positive, got %g' % radius)
        self.center = center
        self.radius = float(radius)
        self.basis = _orthonormal(basis, self.n)
        self.half_axis = None
        if basis is not None:
            self.kind = 'ball-boundary'
        if half_axis is not None:
            axis = as_vector(half_axis, self.n)
            self.half_axis = axis / np.linalg.norm(axis)
            self.kind = 'ball-boundary'

    def _distance(self, v):
        w = v - self.center
        p = (w @ self.basis) @ self.basis.T
        q2 = np.sum((w - p) ** 2, axis=-1)
        p_norm = np.linalg.norm(p, axis=-1)
        squared = q2 + (p_norm - self.radius) ** 2
        if self.half_axis is not None:
            along = p @ self.half_axis
            rest = np.linalg.norm(p - along[..., None] * self.half_axis, axis=-1)
            equator = q2 + along ** 2 + (rest - self.radius) ** 2
            squared = np.where(along < 0.0, equator, squared)
        return np.sqrt(squared)

    def sample(self, resolution=64, radius=10.0, rng=None):
        k = self.basis.shape[1]
        count = resolution if k <= 2 else resolution ** 2
        points = self.center + self.radius * sphere_directions(k, count, rng) @ self.basis.T
        if self.half_axis is not None:
            points = points[(points - self.center) @ self.half_axis >= -1e-12]
        return points


class BallExteriorSet(SetDescriptor):
    """Points u of center + span(basis) with |u - center| >= radius"""
    kind = 'ball-exterior'

    def __init__(self, basis, radius: float, center=None, tolerance: float = TAU_SET, n: int = None):
        basis = np.asarray(basis, dtype=float)
        n = n if n is not None else basis.shape[0]
        super().__init__(n, tolerance)
        self.basis = _orthonormal(basis, n)
        self.radius = float(radius)
        self.center = np.zeros(n) if center is None else as_vector(center, n)

    def _distance(self, v):
        w = v - self.center
        p = (w @ self.basis) @ self.basis.T
        q2 = np.sum((w - p) ** 2, axis=-1)
        gap = np.maximum(0.0, self.radius - np.linalg.norm(p, axis=-1))
        return np.sqrt(q2 + gap ** 2)

    def sample(self, resolution=64, radius=10.0, rng=None):
        k = self.basis.shape[1]
        directions = sphere_directions(k, resolution if k <= 2 else resolution ** 2, rng)
        shells = np.linspace(self.radius, max(radius, self.radius), max(2, resolution // 4))
        coords = (shells[:, None, None] * directions[None, :, :]).reshape(-1, k)
        return self.center + coords @ self.basis.T


class FiniteSampleSet(SetDescriptor):
    kind = 'finite-sample'

    def __init__(self, points, tolerance: float = TAU_SET):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.size == 0:
            raise SpaceError('A finite sample set needs at least one point')
        super().__init__(points.shape[1], tolerance)
        self.points = points

    def _distance(self, v):
        flat = v.reshape(-1, self.n)
        return cdist(flat, self.points).min(axis=1).reshape(v.shape[:-1])

    def sample(self, resolution=64, radius=10.0, rng=None):
        return self.points.copy()


class CompositeSet(SetDescriptor):
    """Union of parts; the distance is the minimum over the parts"""
    kind = 'composite'

    def __init__(self, parts, tolerance: float = TAU_SET):
        parts = list(parts)
        if not parts:
            raise SpaceError('A composite set needs at least one part')
        if len({part.n for part in parts}) != 1:
            raise SpaceError('Composite parts live in different dimensions')
        super().__init__(parts[0].n, tolerance)
        self.parts = parts

    def _distance(self, v):
        return np.minimum.reduce([part._distance(v) for part in self.parts])

    def sample(self, resolution=64, radius=10.0, rng=None):
        return np.vstack([part.sample(resolution, radius, rng) for part in self.parts])


def dist_to_set(descriptor: SetDescriptor, v):
    return descriptor.distance(v)
