import sys

from labeltnc.cli import main

sys.exit(main())
