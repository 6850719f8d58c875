"""Allow ``python -m oasis_svar``."""

import sys

from .cli import main

sys.exit(main())
