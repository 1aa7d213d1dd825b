import sys

from flagcodes.cli import main

sys.exit(main())
