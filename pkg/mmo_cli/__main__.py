"""Allow running as: python -m mmo_cli"""

import sys

from .main import main

sys.exit(main())
