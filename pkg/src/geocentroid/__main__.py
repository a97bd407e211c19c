import sys

from geocentroid.cli import main

sys.exit(main())
