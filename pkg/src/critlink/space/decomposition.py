__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

import enum
import logging

import numpy as np

from ..errors import SpaceError

__all__ = ['Projection', 'Decomposition', 'project', 'as_vector']

logger = logging.getLogger(__name__)


def as_vector(v, n=None) -> np.ndarray:
    vector = np.asarray(v, dtype=float)
    if vector.ndim == 0:
        vector = vector.reshape(1)
    if n is not None and vector.shape[-1] != n:
        raise SpaceError('Expected vectors of dimension %d, got shape %s' % (n, vector.shape))
    if not np.all(np.isfinite(vector)):
        raise SpaceError('Vector has non-finite entries')
    return vector


class Projection(enum.Enum):
    P1 = 'P1'
    P2 = 'P2'
    PE = 'Pe'

    @classmethod
    def parse(cls, which):
        if isinstance(which, Projection):
            return which
        for member in cls:
            if member.value.lower() == str(which).lower():
                return member
        raise SpaceError('Unknown projection %r, expected one of P1, P2, Pe' % (which,))


def _columns(basis, n) -> np.ndarray:
    if basis is None:
        return np.zeros((n, 0))
    array = np.asarray(basis, dtype=float)
    if array.size == 0:
        return np.zeros((n, 0))
    if array.ndim == 1:
        array = array.reshape(n, 1)
    if array.shape[0] != n:
        raise SpaceError('Basis has %d rows but the space has dimension %d' % (array.shape[0], n))
    return array


def _infer_dimension(*candidates) -> int:
    for candidate in candidates:
        if candidate is None:
            continue
        array = np.asarray(candidate, dtype=float)
        if array.ndim == 2:
            return array.shape[0]
        if array.ndim == 1 and array.size:
            return array.size
    raise SpaceError('Cannot infer the dimension of an empty decomposition')


class Decomposition:
    """
    Orthogonal splitting V = V1 + V2 (+ Re) of R^n. The subspaces are kept as orthonormal column
    bases so each projection is a basis multiplication

    :param basis1: n x d1 array of orthonormal columns spanning V1
    :param basis2: n x d2 array of orthonormal columns spanning V2
    :param e: optional vector spanning the extra line, normalized on construction
    """

    def __init__(self, basis1, basis2, e=None, tolerance: float = 1e-10, n: int = None):
        self.n = n if n is not None else _infer_dimension(basis1, basis2, e)
        self.basis1 = _columns(basis1, self.n)
        self.basis2 = _columns(basis2, self.n)
        self.e = None
        if e is not None:
            e = as_vector(e, self.n)
            norm = np.linalg.norm(e)
            if norm == 0.0:
                raise SpaceError('The direction e must be nonzero')
            if abs(norm - 1.0) > tolerance:
                logger.warning('Normalizing e of length %g to unit length', norm)
            self.e = e / norm
        stacked = np.hstack([self.basis1, self.basis2] + ([self.e.reshape(-1, 1)] if self.has_e else []))
        if stacked.shape[1] != self.n:
            raise SpaceError('Bases span %d directions but the space has dimension %d'
                             % (stacked.shape[1], self.n))
        gram_error = np.max(np.abs(stacked.T @ stacked - np.eye(self.n)))
        if gram_error > 1e3 * tolerance:
            raise SpaceError('Basis columns are not mutually orthonormal (Gram error %.3g)' % gram_error)

    @classmethod
    def coordinate(cls, n: int, v1, v2, e_index=None):
        """
        Build a decomposition from coordinate axis indices

        :param n: dimension of the space
        :param v1: indices of the axes spanning V1
        :param v2: indices of the axes spanning V2
        :param e_index: optional index of the axis carrying e
        :return:
        """
        identity = np.eye(n)
        e = identity[:, e_index] if e_index is not None else None
        return cls(identity[:, list(v1)], identity[:, list(v2)], e, n=n)

    @property
    def has_e(self) -> bool:
        return self.e is not None

    @property
    def d1(self) -> int:
        return self.basis1.shape[1]

    @property
    def d2(self) -> int:
        return self.basis2.shape[1]

    def basis(self, which) -> np.ndarray:
        which = Projection.parse(which)
        if which is Projection.P1:
            return self.basis1
        if which is Projection.P2:
            return self.basis2
        if not self.has_e:
            raise SpaceError('Projection Pe requested but the decomposition has no e')
        return self.e.reshape(-1, 1)

    def project(self, which, v) -> np.ndarray:
        basis = self.basis(which)
        v = as_vector(v, self.n)
        return (v @ basis) @ basis.T

    def coordinates(self, which, v) -> np.ndarray:
        return as_vector(v, self.n) @ self.basis(which)

    def to_text(self) -> str:
        lines = ['dimension %d' % self.n]
        for label, basis in (('basis1', self.basis1), ('basis2', self.basis2)):
            lines.append('%s %d' % (label, basis.shape[1]))
            for column in basis.T:
                lines.append(' '.join(repr(float(x)) for x in column))
        if self.has_e:
            lines.append('e')
            lines.append(' '.join(repr(float(x)) for x in self.e))
        return '\n'.join(lines) + '\n'

    @classmethod
    def from_text(cls, text: str):
        rows = [line.split() for line in text.splitlines() if line.strip()]
        try:
            if rows[0][0] != 'dimension':
                raise SpaceError('Decomposition text must start with a dimension line')
            n = int(rows[0][1])
            position = 1
            bases = []
            for label in ('basis1', 'basis2'):
                if rows[position][0] != label:
                    raise SpaceError('Expected %s section' % label)
                count = int(rows[position][1])
                columns = [[float(x) for x in row] for row in rows[position + 1:position + 1 + count]]
                bases.append(np.array(columns).T if columns else np.zeros((n, 0)))
                position += 1 + count
            e = None
            if position < len(rows) and rows[position][0] == 'e':
                e = [float(x) for x in rows[position + 1]]
        except (IndexError, ValueError) as err:
            raise SpaceError('Malformed decomposition text: %s' % err) from err
        return cls(bases[0], bases[1], e, n=n)

    def __repr__(self):
        return 'Decomposition(n=%d, d1=%d, d2=%d, e=%s)' % (self.n, self.d1, self.d2, self.has_e)


def project(decomp: Decomposition, which, v) -> np.ndarray:
    return decomp.project(which, v)
