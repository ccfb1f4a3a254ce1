import sys

from skgeom.cli import main

sys.exit(main())
