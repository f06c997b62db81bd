import sys

from b3gc.cli import main

sys.exit(main())
