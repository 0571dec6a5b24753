import sys

from raagspine.cli import main

sys.exit(main())
