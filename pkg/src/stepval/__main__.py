import sys

from stepval.cli import main

sys.exit(main())
