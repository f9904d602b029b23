import sys

from mubqss.cli import main

sys.exit(main())
