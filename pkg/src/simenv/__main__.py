import sys

from simenv.cli import main

sys.exit(main())
