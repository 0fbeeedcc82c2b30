__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

import itertools
from dataclasses import dataclass

import numpy as np

from ..errors import GeometryError

__all__ = ['SimplicialMesh', 'kuhn_mesh', 'ball_map', 'barycentric_lattice', 'cell_diameters']


@dataclass
class SimplicialMesh:
    """
    Simplicial mesh of the parameter cube [-1, 1]^d. Every cell is a proper simplex of the cube, so
    orientations and barycentric solves are done on params; the owning pair maps params to Q
    """
    params: np.ndarray
    cells: np.ndarray
    boundary_nodes: np.ndarray
    resolution: int

    @property
    def dimension(self) -> int:
        return self.params.shape[1]

    @property
    def node_count(self) -> int:
        return self.params.shape[0]

    @property
    def orientation(self) -> np.ndarray:
        if not hasattr(self, '_orientation'):
            edges = self.params[self.cells[:, 1:]] - self.params[self.cells[:, :1]]
            self._orientation = np.sign(np.linalg.det(edges))
        return self._orientation

    @property
    def interior_nodes(self) -> np.ndarray:
        mask = np.ones(self.node_count, dtype=bool)
        mask[self.boundary_nodes] = False
        return np.flatnonzero(mask)

    def cells_touching(self, nodes) -> np.ndarray:
        return np.flatnonzero(np.isin(self.cells, nodes).any(axis=1))

    def neighbors(self, nodes) -> np.ndarray:
        """Nodes sharing a cell with any of the given nodes, the given nodes included"""
        return np.unique(self.cells[self.cells_touching(nodes)])


def kuhn_mesh(d: int, k: int) -> SimplicialMesh:
    """
    Freudenthal-Kuhn triangulation of [-1, 1]^d with k intervals per axis, d! simplices per cube

    :param d: dimension, 1 to 3
    :param k: intervals per axis
    :return:
    """
    if not 1 <= d <= 3:
        raise GeometryError('Meshes are supported for dimensions 1 to 3, got %d' % d)
    if k < 1:
        raise GeometryError('Mesh needs at least one interval per axis, got %d' % k)
    shape = (k + 1,) * d
    index = np.stack(np.meshgrid(*([np.arange(k + 1)] * d), indexing='ij'), axis=-1).reshape(-1, d)
    params = -1.0 + 2.0 * index / k
    corners = np.stack(np.meshgrid(*([np.arange(k)] * d), indexing='ij'), axis=-1).reshape(-1, d)
    blocks = []
    for permutation in itertools.permutations(range(d)):
        offsets = np.zeros((d + 1, d), dtype=int)
        for step, axis in enumerate(permutation, start=1):
            offsets[step] = offsets[step - 1]
            offsets[step, axis] += 1
        vertices = corners[:, None, :] + offsets[None, :, :]
        blocks.append(np.ravel_multi_index(tuple(np.moveaxis(vertices, -1, 0)), shape))
    cells = np.concatenate(blocks, axis=0)
    boundary = np.flatnonzero(np.any((index == 0) | (index == k), axis=1))
    return SimplicialMesh(params=params, cells=cells, boundary_nodes=boundary, resolution=k)


def ball_map(params: np.ndarray, radius: float) -> np.ndarray:
    """Radial homeomorphism of the cube [-1, 1]^d onto the ball of the given radius"""
    params = np.asarray(params, dtype=float)
    euclidean = np.linalg.norm(params, axis=-1, keepdims=True)
    uniform = np.max(np.abs(params), axis=-1, keepdims=True)
    scale = np.divide(uniform, euclidean, out=np.ones_like(euclidean), where=euclidean > 0.0)
    return radius * params * scale


def cell_diameters(points: np.ndarray, cells: np.ndarray) -> np.ndarray:
    vertices = points[cells]
    largest = np.zeros(len(cells))
    for i, j in itertools.combinations(range(cells.shape[1]), 2):
        largest = np.maximum(largest, np.linalg.norm(vertices[:, i] - vertices[:, j], axis=-1))
    return largest


def barycentric_lattice(d: int, divisions: int) -> np.ndarray:
    """All barycentric coordinate vectors of a simplex with entries in multiples of 1/divisions"""
    rows = [combo for combo in itertools.product(range(divisions + 1), repeat=d) if sum(combo) <= divisions]
    tail = np.array(rows, dtype=float) / divisions
    return np.column_stack([1.0 - tail.sum(axis=1), tail])
