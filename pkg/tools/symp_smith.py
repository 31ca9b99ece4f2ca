#!/usr/bin/env python3

import sys

from sympsmith.cli import main


if __name__ == "__main__":
    # Same entry point as the installed `sympsmith` command, runnable from tools/
    sys.exit(main())
