import sys

from cocyc.cli import main

sys.exit(main())
