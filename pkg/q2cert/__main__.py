"""Allow ``python -m q2cert``."""

import sys

from .cli import main

sys.exit(main())
