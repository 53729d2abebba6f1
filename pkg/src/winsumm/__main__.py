import sys

from winsumm.cli import main

sys.exit(main())
