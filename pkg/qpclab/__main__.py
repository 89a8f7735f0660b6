import sys

from qpclab.cli import main

sys.exit(main())
