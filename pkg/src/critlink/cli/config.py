__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

import logging
import tomllib
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from ..errors import ConfigError, CritLinkError
from ..functional import Functional, make_test_functional, update_functional_dictionary
from ..geometry import LinkingPair, make_pair, update_pair_dictionary
from ..space import Decomposition, FiniteSampleSet

__all__ = ['MODES', 'FunctionalConfig', 'DecompositionConfig', 'PairConfig', 'Tolerances', 'DeformSection',
           'GammaSection', 'EkelandSection', 'CorollarySection', 'ProblemConfig', 'load_config', 'parse_config']

logger = logging.getLogger(__name__)

MODES = ('link-verify', 'minimax', 'deform', 'ekeland', 'corollaries')


def _section(cls, table, name):
    if table is None:
        return cls()
    if not isinstance(table, dict):
        raise ConfigError('[%s] must be a table' % name)
    known = {item.name for item in fields(cls)}
    unknown = sorted(set(table) - known)
    if unknown:
        raise ConfigError('Unknown keys in [%s]: %s' % (name, ', '.join(unknown)))
    return cls(**table)


@dataclass
class FunctionalConfig:
    name: str = 'double_well'
    params: dict = field(default_factory=dict)

    def build(self) -> Functional:
        return make_test_functional(self.name, self.params)


@dataclass
class DecompositionConfig:
    """Either explicit bases (columns) or coordinate index lists v1, v2 and e_index"""
    n: int = None
    basis1: list = None
    basis2: list = None
    e: list = None
    v1: list = None
    v2: list = None
    e_index: int = None

    def build(self) -> Decomposition:
        if self.n is None:
            return None
        if self.v1 is not None or self.v2 is not None:
            return Decomposition.coordinate(self.n, self.v1 or [], self.v2 or [], self.e_index)
        basis1 = np.array(self.basis1 or [], dtype=float).reshape(-1, self.n).T
        basis2 = np.array(self.basis2 or [], dtype=float).reshape(-1, self.n).T
        return Decomposition(basis1, basis2, self.e, n=self.n)


@dataclass
class PairConfig:
    kind: str = 'mp_path'
    rho: float = None
    R: float = None
    R1: float = None
    R2: float = None
    beta: float = None
    start: list = None
    end: list = None
    center: list = None

    def params(self) -> dict:
        return {key: value for key, value in asdict(self).items() if key != 'kind' and value is not None}


@dataclass
class Tolerances:
    tau_c: float = 1e-4
    tau_link: float = 1e-3
    b: float = 1e-3
    tau_M: float = 1e-8
    tau_flow: float = 1e-6
    eta_deg: float = 1e-6
    tau_set: float = 1e-9
    tau_b: float = 1e-8


@dataclass
class DeformSection:
    c: float = 0.0
    eps_bar: float = 0.1
    delta: float = 0.5
    D: list = None
    E: list = None
    max_steps: int = 4096

    def sets(self, n: int):
        if self.E is None:
            raise ConfigError('[deform] needs the points of E')
        E = FiniteSampleSet(np.array(self.E, dtype=float).reshape(-1, n))
        D = None if self.D is None else FiniteSampleSet(np.array(self.D, dtype=float).reshape(-1, n))
        return D, E


@dataclass
class GammaSection:
    kind: str = 'identity'
    amplitude: float = 0.1
    count: int = 1


@dataclass
class EkelandSection:
    mode: str = 'limiting'
    c: float = None


@dataclass
class CorollarySection:
    kind: str = 'pucci_serrin'
    m1: list = None
    m2: list = None
    e: list = None
    r: float = 1.0


@dataclass
class ProblemConfig:
    mode: str = 'minimax'
    seed: int = 0
    mesh_resolution: int = 64
    eps: list = field(default_factory=lambda: [0.2, 0.1, 0.05])
    output: str = 'critlink-out'
    functional: FunctionalConfig = field(default_factory=FunctionalConfig)
    decomposition: DecompositionConfig = field(default_factory=DecompositionConfig)
    pair: PairConfig = field(default_factory=PairConfig)
    tolerances: Tolerances = field(default_factory=Tolerances)
    deform: DeformSection = field(default_factory=DeformSection)
    gamma: GammaSection = field(default_factory=GammaSection)
    ekeland: EkelandSection = field(default_factory=EkelandSection)
    corollary: CorollarySection = field(default_factory=CorollarySection)

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError('Unknown mode %r, known: %s' % (self.mode, ', '.join(MODES)))
        for name, value in asdict(self.tolerances).items():
            if not value > 0.0:
                raise ConfigError('Tolerance %s must be positive, got %r' % (name, value))
        if self.mesh_resolution < 2:
            raise ConfigError('mesh_resolution must be at least 2, got %r' % self.mesh_resolution)
        if not self.eps or any(not eps > 0.0 for eps in self.eps):
            raise ConfigError('eps values must be positive, got %r' % (self.eps,))
        functionals = {}
        update_functional_dictionary(functionals)
        if self.functional.name not in functionals:
            raise ConfigError('Unknown functional %r, known: %s' % (self.functional.name, ', '.join(sorted(functionals))))
        pairs = {}
        update_pair_dictionary(pairs)
        if self.pair.kind not in pairs:
            raise ConfigError('Unknown pair kind %r, known: %s' % (self.pair.kind, ', '.join(sorted(pairs))))
        if self.gamma.kind not in ('identity', 'bump'):
            raise ConfigError('Unknown gamma kind %r, known: identity, bump' % self.gamma.kind)
        if self.ekeland.mode not in ('limiting', 'strict'):
            raise ConfigError('Unknown ekeland mode %r, known: limiting, strict' % self.ekeland.mode)
        if self.corollary.kind not in ('pucci_serrin', 'rabinowitz'):
            raise ConfigError('Unknown corollary %r, known: pucci_serrin, rabinowitz' % self.corollary.kind)
        return self

    def build_functional(self) -> Functional:
        try:
            return self.functional.build()
        except (TypeError, CritLinkError) as err:
            raise ConfigError('Invalid functional parameters: %s' % err) from err

    def build_pair(self) -> LinkingPair:
        try:
            return make_pair(self.pair.kind, self.decomposition.build(),
                             {**self.pair.params(), 'tolerance': self.tolerances.tau_set}, self.mesh_resolution)
        except CritLinkError as err:
            raise ConfigError('Invalid pair configuration: %s' % err) from err

    def to_dict(self):
        return asdict(self)


def parse_config(data: dict) -> ProblemConfig:
    """Map a parsed TOML document onto ProblemConfig; the [problem] table holds the top level keys"""
    data = dict(data)
    problem = data.pop('problem', {})
    sections = {'functional': FunctionalConfig, 'decomposition': DecompositionConfig, 'pair': PairConfig,
                'tolerances': Tolerances, 'deform': DeformSection, 'gamma': GammaSection, 'ekeland': EkelandSection,
                'corollary': CorollarySection}
    unknown = sorted(set(data) - set(sections))
    if unknown:
        raise ConfigError('Unknown tables: %s' % ', '.join(unknown))
    try:
        built = {name: _section(cls, data.get(name), name) for name, cls in sections.items()}
        config = ProblemConfig(**{**problem, **built})
    except TypeError as err:
        raise ConfigError('Invalid [problem] table: %s' % err) from err
    return config.validate()


def load_config(path) -> ProblemConfig:
    try:
        with open(path, 'rb') as fh:
            data = tomllib.load(fh)
    except OSError as err:
        raise ConfigError('Cannot read %s: %s' % (path, err)) from err
    except tomllib.TOMLDecodeError as err:
        raise ConfigError('Malformed TOML in %s: %s' % (path, err)) from err
    logger.debug('Loaded configuration from %s', path)
    return parse_config(data)
