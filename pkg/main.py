# main.py
import sys

from src.cli import main

# --------------------------------------------------------------------------- #
# CLI entry-point                                                             #
# --------------------------------------------------------------------------- #
if __name__ == "__main__":
    sys.exit(main())
