#!/usr/bin/env python3
"""Write the procedural desk-scale sample set (terrestrial/, underwater/, manifests/)."""

import argparse
import sys

sys.path.insert(0, ".")

from aqualume.modules.data import write_sample_set
from aqualume.telemetry import configure_logging


def main() -> int:
    parser = argparse.ArgumentParser(description="Generate the procedural sample set")
    parser.add_argument("root", help="Output directory")
    parser.add_argument("--count", type=int, default=32, help="Images per domain")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--size", type=int, default=256)
    args = parser.parse_args()

    configure_logging("info")
    underwater, terrestrial = write_sample_set(args.root, args.count, args.seed, args.size)
    print(f"underwater:  {underwater}")
    print(f"terrestrial: {terrestrial}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
