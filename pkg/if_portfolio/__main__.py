"""Entry point for `python -m if_portfolio`."""

import sys

from .cli import main

sys.exit(main())
