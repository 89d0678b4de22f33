import sys

from screenmin.entrypoint import main

sys.exit(main())
