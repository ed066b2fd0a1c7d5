import sys

from cqi.cli import main

sys.exit(main())
