import sys

from adv2e.cli import main

sys.exit(main())
