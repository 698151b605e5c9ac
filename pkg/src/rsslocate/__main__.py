import sys

from rsslocate.cli import main

sys.exit(main())
