import sys

from probcover.cli import main

sys.exit(main())
