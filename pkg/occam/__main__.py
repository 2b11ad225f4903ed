import sys

from occam.main import main

sys.exit(main())
