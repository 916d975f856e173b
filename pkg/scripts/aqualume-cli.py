#!/usr/bin/env python3
"""Aqualume CLI launcher for running from a source checkout."""

import sys

# Add parent directory to path for imports
sys.path.insert(0, ".")

from aqualume.cli import main

if __name__ == "__main__":
    sys.exit(main())
