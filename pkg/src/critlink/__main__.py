__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

import sys

from .cli.run import main

if __name__ == '__main__':
    sys.exit(main())
