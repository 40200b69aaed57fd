#!/usr/bin/env python3

import sys

from modules.cli import run
from modules.logger import logger

if __name__ == "__main__":
    try:
        sys.exit(run(sys.argv[1:]))
    except KeyboardInterrupt:
        logger.info("Interrupted.")
        sys.exit(130)
    except Exception:
        logger.exception("An unexpected error occurred! Details:")
        sys.exit(1)
