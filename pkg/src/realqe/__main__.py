import sys

from realqe.cli import main

sys.exit(main())
