__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import EkelandError
from ..geometry import LinkingPair

__all__ = ['Entry', 'MapSpace', 'LadderOracle']

logger = logging.getLogger(__name__)


@dataclass
class Entry:
    """
    Evaluation point of a max-type functional on a map: its value, image, pointwise gradient and the
    free nodes (with barycentric weights) whose common translation moves the image
    """
    value: float
    point: np.ndarray
    gradient: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    node: int = None

    def to_dict(self):
        return {'value': self.value, 'point': self.point.tolist(), 'node': self.node,
                'support': self.nodes.tolist()}


class MapSpace:
    """
    Maps of a region of the mesh of Q given by node images, equal to the base map on the pinned nodes
    and outside the region. Points are full N x n image arrays and the distance is the uniform one
    """

    def __init__(self, pair: LinkingPair, base_images, region_nodes, pinned_nodes):
        self.pair = pair
        self.base = np.array(base_images, dtype=float)
        self.region = np.asarray(region_nodes, dtype=int)
        self.pinned = np.intersect1d(np.asarray(pinned_nodes, dtype=int), self.region)
        self.free = np.setdiff1d(self.region, self.pinned)
        if len(self.region) == 0:
            raise EkelandError('Map space over an empty region')
        self.cells = pair.mesh.cells_touching(self.region)
        self._free_mask = np.zeros(len(self.base), dtype=bool)
        self._free_mask[self.free] = True

    @property
    def pin_values(self) -> np.ndarray:
        return self.base[self.pinned]

    def initial(self) -> np.ndarray:
        return self.base.copy()

    def is_free(self, nodes) -> np.ndarray:
        return self._free_mask[np.asarray(nodes, dtype=int)]

    def contains(self, images) -> bool:
        images = np.asarray(images, dtype=float)
        outside = np.setdiff1d(np.arange(len(self.base)), self.region)
        return bool(np.array_equal(images[self.pinned], self.pin_values)
                    and np.array_equal(images[outside], self.base[outside]))

    def distance(self, a, b) -> float:
        return float(np.max(np.linalg.norm(a[self.region] - b[self.region], axis=1)))

    def neighbors(self, node: int) -> np.ndarray:
        around = self.pair.mesh.neighbors([node])
        return around[self.is_free(around) & (around != node)]

    def moved(self, images, nodes, vector) -> np.ndarray:
        candidate = images.copy()
        nodes = np.asarray(nodes, dtype=int)
        nodes = nodes[self.is_free(nodes)]
        candidate[nodes] += vector
        return candidate


class LadderOracle:
    """
    Candidate moves at a map y for a max-type objective, with magnitudes s = top, top / 2, ... down to floor:
    each maximizer moved along the coordinate axes and against its pointwise gradient, a smoothed bump
    over its free neighbours, every entry within slope * s of the max moved s against its gradient, and
    the whole map moved against the pointwise gradient of f
    """

    def __init__(self, space: MapSpace, objective, top: float, floor: float, slope: float = 0.0,
                 tau_M: float = 1e-8):
        if not 0.0 < floor < top:
            raise EkelandError('Ladder needs 0 < floor < top, got %g and %g' % (floor, top))
        if slope < 0.0:
            raise EkelandError('Ladder slope must be nonnegative, got %g' % slope)
        self.space = space
        self.objective = objective
        self.slope = float(slope)
        self.tau_M = tau_M
        self.magnitudes = top * 0.5 ** np.arange(int(np.floor(np.log2(top / floor))) + 1)

    @property
    def tie_band(self) -> float:
        """Band below the max holding every entry whose band move was tried at the floor magnitude"""
        return max(self.tau_M, 2.0 * self.slope * float(self.magnitudes[-1]))

    def _shift(self, y, entries):
        """Unit steps against the entry gradients, summed on the free nodes and capped at length one"""
        shift = np.zeros_like(y)
        for entry in entries:
            norm = float(np.linalg.norm(entry.gradient))
            free = entry.nodes[self.space.is_free(entry.nodes)]
            if norm > 0.0 and len(free):
                shift[free] -= entry.gradient / norm
        lengths = np.linalg.norm(shift, axis=1)
        if not np.any(lengths > 0.0):
            return None
        return shift / np.maximum(lengths, 1.0)[:, None]

    def _descent(self, y, entries):
        direction = np.zeros_like(y)
        for entry in entries:
            if entry.node is not None and self.space.is_free([entry.node])[0]:
                direction[entry.node] = -entry.gradient / max(1.0, float(np.linalg.norm(entry.gradient)))
        return direction if np.any(direction != 0.0) else None

    def __call__(self, y):
        space = self.space
        value, entries = self.objective.evaluate(y)
        maximizers = [entry for entry in entries if entry.value >= value - self.tau_M]
        n = y.shape[1]
        axes = np.vstack([np.eye(n), -np.eye(n)])
        for entry in maximizers:
            free = entry.nodes[space.is_free(entry.nodes)]
            if len(free) == 0:
                continue
            norm = float(np.linalg.norm(entry.gradient))
            directions = axes if norm == 0.0 else np.vstack([axes, -entry.gradient / norm])
            for magnitude in self.magnitudes:
                for direction in directions:
                    yield space.moved(y, free, magnitude * direction)
                if entry.node is not None and norm > 0.0:
                    bump = space.moved(y, free, -magnitude * entry.gradient / norm)
                    around = space.neighbors(entry.node)
                    bump[around] -= 0.5 * magnitude * entry.gradient / norm
                    yield bump
        descent = self._descent(y, entries)
        for magnitude in self.magnitudes:
            band = self._shift(y, [entry for entry in entries if entry.value >= value - self.slope * magnitude])
            if band is not None:
                yield y + magnitude * band
            if descent is not None:
                yield y + magnitude * descent
