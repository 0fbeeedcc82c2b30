__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import DegreeUndefinedError, GeometryError
from .mesh import SimplicialMesh

__all__ = ['ETA_DEG', 'DegreeResult', 'brouwer_degree']

logger = logging.getLogger(__name__)

ETA_DEG = 1e-6

_GENERIC_OFFSET = np.array([1.0, np.sqrt(2.0) - 1.0, np.pi - 3.0])


@dataclass
class DegreeResult:
    degree: int
    boundary_margin: float
    certificate: list = field(default_factory=list)

    def signed_count(self) -> int:
        return int(sum(sign for _, sign, _ in self.certificate))

    def to_dict(self):
        return {'degree': self.degree,
                'boundary_margin': self.boundary_margin,
                'certificate': [{'cell': int(cell), 'sign': int(sign), 'barycentric': np.asarray(weights).tolist()}
                                for cell, sign, weights in self.certificate]}


def brouwer_degree(values: np.ndarray, mesh: SimplicialMesh, target=None, eta: float = ETA_DEG) -> DegreeResult:
    """
    Degree of the piecewise linear interpolant of node values at target, by signed counting of the
    cells whose image simplex contains the target. The target is moved by a tiny fixed offset so it
    never sits on a shared face; cells with a singular image are skipped

    :param values: N x d map values at the mesh nodes
    :param mesh: mesh of the parameter cube, d <= 3
    :param target: point y of R^d, default the origin
    :param eta: minimum distance between the boundary values and y
    :return:
    """
    values = np.asarray(values, dtype=float)
    d = mesh.dimension
    if values.shape != (mesh.node_count, d):
        raise GeometryError('Degree needs %d x %d node values, got %s' % (mesh.node_count, d, values.shape))
    target = np.zeros(d) if target is None else np.asarray(target, dtype=float).reshape(d)
    margin = float(np.min(np.linalg.norm(values[mesh.boundary_nodes] - target, axis=1)))
    if margin < eta:
        logger.warning('Boundary value within %.3g of the degree target', margin)
        raise DegreeUndefinedError('Degree undefined near boundary zero (margin %.3g < %.3g)' % (margin, eta),
                                   margin=margin)
    offset = _GENERIC_OFFSET[:d] / np.linalg.norm(_GENERIC_OFFSET[:d])
    scale = max(1.0, float(np.max(np.abs(values))))
    shifted = target + 1e-10 * scale * offset

    base = values[mesh.cells[:, 0]]
    matrices = np.transpose(values[mesh.cells[:, 1:]] - base[:, None, :], (0, 2, 1))
    determinants = np.linalg.det(matrices)
    regular = np.flatnonzero(np.abs(determinants) > 1e-300)
    tail = np.linalg.solve(matrices[regular], (shifted - base[regular])[:, :, None])[:, :, 0]
    weights = np.column_stack([1.0 - tail.sum(axis=1), tail])
    inside = np.all(weights >= 0.0, axis=1)
    cells = regular[inside]
    signs = (np.sign(determinants[cells]) * mesh.orientation[cells]).astype(int)
    certificate = [(int(cell), int(sign), weight) for cell, sign, weight in zip(cells, signs, weights[inside])]
    degree = int(np.sum(signs))
    logger.debug('Degree %d from %d preimage cells, boundary margin %.3g', degree, len(cells), margin)
    return DegreeResult(degree=degree, boundary_margin=margin, certificate=certificate)
