import sys

from qpb.cli import main

sys.exit(main())
