import sys

from foliation_kit.app import main

sys.exit(main())
