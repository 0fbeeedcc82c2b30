__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

import logging
from abc import ABC, abstractmethod

import numpy as np

from ..errors import GeometryError
from ..space import (Decomposition, SubspaceSet, SphereSet, BallExteriorSet, CompositeSet, TAU_SET,
                     as_vector)
from .mesh import kuhn_mesh, ball_map, cell_diameters

__all__ = ['LinkingPair', 'SaddlePair', 'CylinderPair', 'SilvaPair', 'PathPair', 'chi_beta',
           'update_pair_dictionary', 'make_pair']

logger = logging.getLogger(__name__)


def chi_beta(beta: float, x, rho: float = 1.0):
    """
    Continuous cutoff: 0 for x <= 0, beta x / rho on [0, rho / beta], 1 beyond

    :param beta: slope parameter, positive
    :param x: scalar or array
    :param rho: radius of the enclosing pair
    :return:
    """
    if beta <= 0.0:
        raise GeometryError('chi_beta needs beta > 0, got %g' % beta)
    values = np.clip(beta * np.asarray(x, dtype=float) / rho, 0.0, 1.0)
    return float(values) if values.ndim == 0 else values


def _require(condition: bool, inequality: str, **values):
    if not condition:
        detail = ', '.join('%s=%g' % item for item in values.items())
        logger.warning('Pair parameter check failed: %s (%s)', inequality, detail)
        raise GeometryError('%s violated (%s)' % (inequality, detail))


class LinkingPair(ABC):
    """
    Linking pair (S, Q, dQ) with a simplicial mesh of Q. Subclasses define how parameter cube
    coordinates become local coordinates of Q, how local coordinates embed in R^n and, when a
    degree argument is available, the homotopy joining the identity to the linking map

    After construction the pair carries
    mesh: the SimplicialMesh of the parameter cube
    local: node coordinates in the local frame of Q
    nodes: node positions in R^n
    boundary_margin: min over boundary nodes of dist(node, S), strictly positive
    """
    supports_homotopy = False

    @staticmethod
    @abstractmethod
    def pair_kind() -> str:
        """pass"""

    def __init__(self, decomp: Decomposition, mesh_resolution: int = 64, tolerance: float = TAU_SET):
        if int(mesh_resolution) < 2:
            raise GeometryError('Mesh resolution must be at least 2, got %r' % (mesh_resolution,))
        self.kind = self.pair_kind()
        self.decomp = decomp
        self.mesh_resolution = int(mesh_resolution)
        self.tolerance = tolerance
        self.S = self._build_set()
        self._build_mesh()
        self._check_boundary()

    @property
    @abstractmethod
    def dimension(self) -> int:
        """Dimension of Q"""

    @property
    @abstractmethod
    def diameter(self) -> float:
        """pass"""

    @abstractmethod
    def _build_set(self):
        """pass"""

    @abstractmethod
    def local_from_params(self, params: np.ndarray) -> np.ndarray:
        """pass"""

    @abstractmethod
    def embed(self, local: np.ndarray) -> np.ndarray:
        """pass"""

    @abstractmethod
    def boundary_weight(self, local: np.ndarray) -> np.ndarray:
        """Continuous weight in [0, 1] vanishing exactly on the boundary of Q"""

    @property
    def n(self) -> int:
        return self.decomp.n

    def homotopy(self, t: float, images: np.ndarray, beta: float = None):
        """
        Values of the linking homotopy at the mesh nodes and its target point. At t = 0 the map is
        the identity of Q in local coordinates; at t = 1 its zeros are points whose image lies on S

        :param t: homotopy parameter in [0, 1]
        :param images: node images of an admissible map, N x n
        :param beta: cutoff slope where the homotopy uses one
        :return: (values N x d, target d)
        """
        raise GeometryError('Pair kind %s has no degree homotopy' % self.kind)

    def _build_mesh(self):
        target = self.diameter / self.mesh_resolution
        k = self.mesh_resolution
        for _ in range(8):
            mesh = kuhn_mesh(self.dimension, k)
            local = self.local_from_params(mesh.params)
            nodes = self.embed(local)
            largest = float(np.max(cell_diameters(nodes, mesh.cells)))
            if largest <= target * (1.0 + 1e-9):
                break
            k = int(np.ceil(k * largest / target))
            if k % 2:
                k += 1
        else:
            raise GeometryError('Could not reach cell diameter %g for %s' % (target, self.kind))
        self.mesh = mesh
        self.local = local
        self.nodes = nodes
        logger.debug('%s mesh: %d nodes, %d cells, max cell diameter %.3g', self.kind, len(nodes),
                     len(mesh.cells), largest)

    def _check_boundary(self):
        distances = self.S.distance(self.nodes[self.mesh.boundary_nodes])
        self.boundary_margin = float(np.min(distances))
        if self.boundary_margin <= self.tolerance:
            worst = self.nodes[self.mesh.boundary_nodes][int(np.argmin(distances))]
            logger.warning('S meets the boundary of Q at %s', worst.tolist())
            raise GeometryError('S and the boundary of Q intersect (min distance %.3g)' % self.boundary_margin)

    def param_point(self, cell: int, barycentric) -> np.ndarray:
        return np.asarray(barycentric) @ self.mesh.params[self.mesh.cells[cell]]

    def point(self, cell: int, barycentric) -> np.ndarray:
        """Point of Q at the given barycentric location of a cell"""
        return self.embed(self.local_from_params(self.param_point(cell, barycentric)[None, :]))[0]

    def interpolate(self, values: np.ndarray, cell: int, barycentric) -> np.ndarray:
        return np.asarray(barycentric) @ values[self.mesh.cells[cell]]

    def __repr__(self):
        return '%s(n=%d, dim Q=%d, nodes=%d)' % (self.__class__.__name__, self.n, self.dimension, len(self.nodes))


class SaddlePair(LinkingPair):
    """S = V1 and Q = B_R(0) in V2"""
    supports_homotopy = True

    @staticmethod
    def pair_kind() -> str:
        return 'saddle'

    def __init__(self, decomp: Decomposition, R: float, mesh_resolution: int = 64, tolerance: float = TAU_SET):
        _require(R > 0.0, 'R > 0', R=R)
        _require(decomp.d2 >= 1, 'd2 >= 1', d2=decomp.d2)
        _require(decomp.d2 <= 3, 'd2 <= 3', d2=decomp.d2)
        self.R = float(R)
        super().__init__(decomp, mesh_resolution, tolerance)

    @property
    def dimension(self):
        return self.decomp.d2

    @property
    def diameter(self):
        return 2.0 * self.R

    def _build_set(self):
        return SubspaceSet(self.decomp.basis1, n=self.decomp.n, tolerance=self.tolerance)

    def local_from_params(self, params):
        return ball_map(params, self.R)

    def embed(self, local):
        return local @ self.decomp.basis2.T

    def boundary_weight(self, local):
        return np.clip(1.0 - np.sum(local ** 2, axis=-1) / self.R ** 2, 0.0, 1.0)

    def homotopy(self, t, images, beta=None):
        projected = images @ self.decomp.basis2
        return t * projected + (1.0 - t) * self.local, np.zeros(self.dimension)


class CylinderPair(LinkingPair):
    """
    S = {u in V1 : |u| = rho} and Q = {s e + u2 : 0 <= s <= R1, u2 in V2, |u2| <= R2} for a unit e in V1
    """
    supports_homotopy = True

    @staticmethod
    def pair_kind() -> str:
        return 'mp_cylinder'

    def __init__(self, decomp: Decomposition, rho: float, R1: float, R2: float, e=None,
                 mesh_resolution: int = 64, tolerance: float = TAU_SET):
        _require(decomp.d1 >= 1, 'd1 >= 1', d1=decomp.d1)
        _require(0.0 < rho < R1, '0 < rho < R1', rho=rho, R1=R1)
        _require(R2 > 0.0, 'R2 > 0', R2=R2)
        _require(decomp.d2 + 1 <= 3, 'd2 + 1 <= 3', d2=decomp.d2)
        direction = decomp.basis1[:, 0] if e is None else as_vector(e, decomp.n)
        norm = float(np.linalg.norm(direction))
        _require(norm > 0.0, '|e| > 0', norm=norm)
        if abs(norm - 1.0) > 1e-12:
            logger.info('Normalizing e of length %g', norm)
        direction = direction / norm
        off_plane = float(np.linalg.norm(direction - decomp.project('P1', direction)))
        _require(off_plane <= 1e-8, 'e in V1', distance=off_plane)
        self.e = direction
        self.rho = float(rho)
        self.R1 = float(R1)
        self.R2 = float(R2)
        super().__init__(decomp, mesh_resolution, tolerance)

    @property
    def dimension(self):
        return 1 + self.decomp.d2

    @property
    def diameter(self):
        return float(np.hypot(self.R1, 2.0 * self.R2))

    def _build_set(self):
        return SphereSet(np.zeros(self.decomp.n), self.rho, basis=self.decomp.basis1, tolerance=self.tolerance)

    def local_from_params(self, params):
        s = self.R1 * (params[:, :1] + 1.0) / 2.0
        if self.decomp.d2 == 0:
            return s
        return np.hstack([s, ball_map(params[:, 1:], self.R2)])

    def embed(self, local):
        return local[:, :1] * self.e + local[:, 1:] @ self.decomp.basis2.T

    def boundary_weight(self, local):
        s = local[:, 0]
        axial = 4.0 * s * (self.R1 - s) / self.R1 ** 2
        radial = 1.0 - np.sum(local[:, 1:] ** 2, axis=-1) / self.R2 ** 2
        return np.clip(axial * radial, 0.0, 1.0)

    def homotopy(self, t, images, beta=None):
        first = np.linalg.norm(images @ self.decomp.basis1, axis=-1)
        s = self.local[:, 0]
        u = self.local[:, 1:]
        values = np.column_stack([t * first - self.rho + (1.0 - t) * s,
                                  t * (images @ self.decomp.basis2) + (1.0 - t) * u])
        return values, np.zeros(self.dimension)


class SilvaPair(LinkingPair):
    """
    V = V1 + Re + V2, S_rho = closure(V2 minus B_rho) union (dB_rho intersected with R+e + V2) and
    Q = D_R, the ball of radius R in V1 + Re
    """
    supports_homotopy = True

    @staticmethod
    def pair_kind() -> str:
        return 'silva'

    def __init__(self, decomp: Decomposition, rho: float, R: float, beta: float = 2.0,
                 mesh_resolution: int = 64, tolerance: float = TAU_SET):
        _require(decomp.has_e, 'e configured', d1=decomp.d1)
        _require(rho > 0.0, 'rho > 0', rho=rho)
        _require(rho < R, 'rho < R', rho=rho, R=R)
        _require(beta > 0.0, 'beta > 0', beta=beta)
        _require(decomp.d1 + 1 <= 3, 'd1 + 1 <= 3', d1=decomp.d1)
        self.rho = float(rho)
        self.R = float(R)
        self.beta = float(beta)
        self.frame = np.hstack([decomp.basis1, decomp.e.reshape(-1, 1)])
        super().__init__(decomp, mesh_resolution, tolerance)

    @property
    def dimension(self):
        return self.decomp.d1 + 1

    @property
    def diameter(self):
        return 2.0 * self.R

    def _build_set(self):
        n = self.decomp.n
        hemisphere_span = np.hstack([self.decomp.e.reshape(-1, 1), self.decomp.basis2])
        return CompositeSet([BallExteriorSet(self.decomp.basis2, self.rho, n=n, tolerance=self.tolerance),
                             SphereSet(np.zeros(n), self.rho, basis=hemisphere_span, half_axis=self.decomp.e,
                                       tolerance=self.tolerance)],
                            tolerance=self.tolerance)

    def local_from_params(self, params):
        return ball_map(params, self.R)

    def embed(self, local):
        return local @ self.frame.T

    def boundary_weight(self, local):
        return np.clip(1.0 - np.sum(local ** 2, axis=-1) / self.R ** 2, 0.0, 1.0)

    def collapse(self, images, beta=None):
        """The linking map P1 g + chi_beta(Pe g) |(I - P1) g| e in local coordinates"""
        beta = self.beta if beta is None else beta
        first = images @ self.decomp.basis1
        along = images @ self.decomp.e
        remainder = np.linalg.norm(images - first @ self.decomp.basis1.T, axis=-1)
        return np.column_stack([first, chi_beta(beta, along, self.rho) * remainder])

    def homotopy(self, t, images, beta=None):
        s = 1.0 - t
        target = np.zeros(self.dimension)
        target[-1] = self.rho
        return s * self.local + (1.0 - s) * self.collapse(images, beta), target


class PathPair(LinkingPair):
    """
    Mountain pass geometry: Q is the segment from start to end and S the sphere of radius rho about
    center (default start). Linking needs the endpoints on opposite sides of the sphere
    """

    @staticmethod
    def pair_kind() -> str:
        return 'mp_path'

    def __init__(self, decomp: Decomposition = None, rho: float = 1.0, end=None, start=None, center=None,
                 e=None, mesh_resolution: int = 64, tolerance: float = TAU_SET):
        end = e if end is None else end
        if end is None:
            raise GeometryError('mp_path needs an end point e')
        end = as_vector(end)
        n = end.size if decomp is None else decomp.n
        self.end = as_vector(end, n)
        self.start = np.zeros(n) if start is None else as_vector(start, n)
        self.center = self.start.copy() if center is None else as_vector(center, n)
        self.rho = float(rho)
        self.length = float(np.linalg.norm(self.end - self.start))
        _require(self.rho > 0.0, 'rho > 0', rho=self.rho)
        _require(self.length > 0.0, '|end - start| > 0', length=self.length)
        if decomp is None:
            decomp = Decomposition(np.eye(n), np.zeros((n, 0)), n=n)
        inner = float(np.linalg.norm(self.start - self.center))
        outer = float(np.linalg.norm(self.end - self.center))
        if inner == 0.0:
            _require(outer > self.rho, '|e| > rho', e=outer, rho=self.rho)
        elif not min(inner, outer) < self.rho < max(inner, outer):
            logger.warning('Endpoints at distances %g and %g from the center do not straddle rho = %g; '
                           'linking is not guaranteed', inner, outer, self.rho)
        super().__init__(decomp, mesh_resolution, tolerance)

    @property
    def dimension(self):
        return 1

    @property
    def diameter(self):
        return self.length

    def _build_set(self):
        return SphereSet(self.center, self.rho, tolerance=self.tolerance)

    def local_from_params(self, params):
        return (params[:, :1] + 1.0) / 2.0

    def embed(self, local):
        return self.start + local[:, :1] * (self.end - self.start)

    def boundary_weight(self, local):
        tau = local[:, 0]
        return np.clip(4.0 * tau * (1.0 - tau), 0.0, 1.0)


def update_pair_dictionary(pair_dictionary):
    for sub_class in LinkingPair.__subclasses__():
        pair_dictionary.update({sub_class.pair_kind(): sub_class})


def make_pair(kind: str, decomp: Decomposition, params=None, mesh_resolution: int = 64) -> LinkingPair:
    """
    Construct a linking pair of the given kind

    :param kind: saddle, mp_cylinder, silva or mp_path
    :param decomp: decomposition of R^n, optional for mp_path
    :param params: keyword parameters of the pair (rho, R, R1, R2, e, beta, start, end, center)
    :param mesh_resolution: cells per diameter of Q
    :return:
    """
    library = {}
    update_pair_dictionary(library)
    if kind not in library:
        raise GeometryError('Unknown pair kind %r, known: %s' % (kind, ', '.join(sorted(library))))
    try:
        return library[kind](decomp, mesh_resolution=mesh_resolution, **dict(params or {}))
    except TypeError as err:
        raise GeometryError('Invalid parameters for %s: %s' % (kind, err)) from err
