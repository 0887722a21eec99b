import sys

from iacopt.cli import main

sys.exit(main())
