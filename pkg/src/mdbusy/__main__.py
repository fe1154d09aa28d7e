import sys

from mdbusy.cli import main

sys.exit(main())
