__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

from .principle import *
from .subdifferential import *
from .mapspace import *
from .limiting import *
from .strict import *
