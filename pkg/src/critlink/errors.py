__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"


class CritLinkError(Exception):
    """
    Root of every error raised by the toolkit. The module attribute names the subsystem the
    error came from so the command line front end can report its provenance
    """
    module = 'critlink'


class ConfigError(CritLinkError, ValueError):
    module = 'cli'


class SpaceError(CritLinkError, ValueError):
    module = 'space'


class FunctionalError(CritLinkError, ValueError):
    module = 'functional'


class CriticalPointError(FunctionalError):
    """Raised when a pseudogradient is requested at a critical point"""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class GeometryError(CritLinkError, ValueError):
    module = 'geometry'


class LinkingViolation(GeometryError):
    def __init__(self, message, residual=None, point=None):
        super().__init__(message)
        self.residual = residual
        self.point = point


class DegreeUndefinedError(GeometryError):
    def __init__(self, message, margin=None):
        super().__init__(message)
        self.margin = margin


class DeformationError(CritLinkError):
    module = 'deformation'


class HypothesisError(DeformationError, ValueError):
    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class FlowStallError(DeformationError):
    pass


class MinimaxError(CritLinkError):
    module = 'minimax'


class GeometryBoundsError(MinimaxError, ValueError):
    pass


class EkelandError(CritLinkError):
    module = 'ekeland'


class EkelandPreconditionError(EkelandError, ValueError):
    pass


class OracleExhaustedError(EkelandError):
    def __init__(self, message, candidate=None):
        super().__init__(message)
        self.candidate = candidate
