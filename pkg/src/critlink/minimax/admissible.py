__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

import logging

import numpy as np

from ..errors import GeometryError
from ..geometry import LinkingPair

__all__ = ['AdmissibleMap']

logger = logging.getLogger(__name__)


class AdmissibleMap:
    """
    Piecewise linear map of Q given by its node images on the pair's mesh. Boundary nodes map to
    themselves exactly, which is the class of maps equal to the identity on the boundary of Q
    """
    class_tag = 'Gamma1'

    def __init__(self, pair: LinkingPair, node_images):
        images = np.array(node_images, dtype=float)
        if images.shape != pair.nodes.shape:
            raise GeometryError('Map needs %s node images, got %s' % (pair.nodes.shape, images.shape))
        if not np.all(np.isfinite(images)):
            raise GeometryError('Map has non-finite node images')
        self.pair = pair
        self.node_images = images
        deviation = self.boundary_deviation()
        if deviation != 0.0:
            logger.warning('Boundary nodes moved by %.3g', deviation)
            raise GeometryError('Map is not the identity on the boundary of Q (deviation %.3g)' % deviation)

    @classmethod
    def identity(cls, pair: LinkingPair):
        return cls(pair, pair.nodes.copy())

    @classmethod
    def from_function(cls, pair: LinkingPair, function):
        """
        Sample a map of R^n on the mesh nodes and pin the boundary

        :param pair:
        :param function: callable taking an N x n array of points of Q
        :return:
        """
        images = np.array(function(pair.nodes.copy()), dtype=float)
        return cls(pair, cls._pinned(pair, images))

    @classmethod
    def perturbed_identity(cls, pair: LinkingPair, amplitude: float, rng=None, modes: int = 3):
        """
        Identity plus a smooth random displacement of size at most amplitude, damped by the boundary weight
        of the pair so the boundary stays fixed

        :param pair:
        :param amplitude: bound on the displacement norm
        :param rng: numpy Generator
        :param modes: number of random sine modes
        :return:
        """
        rng = rng if rng is not None else np.random.default_rng(0)
        local = pair.local
        frequencies = rng.standard_normal((modes, local.shape[1])) * np.pi / pair.diameter
        phases = rng.uniform(0.0, 2.0 * np.pi, modes)
        directions = rng.standard_normal((modes, pair.n))
        waves = np.sin(local @ frequencies.T + phases)
        displacement = pair.boundary_weight(local)[:, None] * (waves @ directions)
        largest = float(np.max(np.linalg.norm(displacement, axis=1)))
        if largest > 0.0:
            displacement *= amplitude * rng.uniform(0.5, 1.0) / largest
        return cls(pair, cls._pinned(pair, pair.nodes + displacement))

    @staticmethod
    def _pinned(pair, images):
        images[pair.mesh.boundary_nodes] = pair.nodes[pair.mesh.boundary_nodes]
        return images

    def boundary_deviation(self) -> float:
        boundary = self.pair.mesh.boundary_nodes
        return float(np.max(np.linalg.norm(self.node_images[boundary] - self.pair.nodes[boundary], axis=1)))

    def interpolate(self, cell: int, barycentric) -> np.ndarray:
        return self.pair.interpolate(self.node_images, cell, barycentric)

    def compose(self, deformation):
        """
        The map deformation o gamma, evaluated at the node images, with the boundary re-pinned

        :param deformation: callable mapping an N x n array of points to their images
        :return: (composed map, largest boundary displacement before re-pinning)
        """
        moved = np.array(deformation(self.node_images.copy()), dtype=float)
        boundary = self.pair.mesh.boundary_nodes
        drift = float(np.max(np.linalg.norm(moved[boundary] - self.pair.nodes[boundary], axis=1)))
        return AdmissibleMap(self.pair, self._pinned(self.pair, moved)), drift

    def copy(self):
        return AdmissibleMap(self.pair, self.node_images.copy())

    def to_dict(self):
        return {'class': self.class_tag, 'kind': self.pair.kind, 'node_images': self.node_images.tolist()}

    def __repr__(self):
        return 'AdmissibleMap(%s, nodes=%d)' % (self.pair.kind, len(self.node_images))
