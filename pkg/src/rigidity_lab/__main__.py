"""Allow running as: python3 -m rigidity_lab"""

import sys

from rigidity_lab.cli import main

sys.exit(main())
