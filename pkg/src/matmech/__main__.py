import sys

from matmech.cli import main

sys.exit(main())
