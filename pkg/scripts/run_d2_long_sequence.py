#!/usr/bin/env python3
"""Extend the square-lattice partition sequence beyond the desk-scale head.

Counts partitions of the square lattice into n orbits for n up to --max-n.
Each step needs subgroups up to index 8n, so the cost climbs quickly; n=8
is minutes, n beyond 10 is an overnight run.
"""

import argparse
import sys
import time

from latcol.catalog import RunConfig, enumerate_partitions

KNOWN_HEAD = {2: 9, 3: 22, 4: 44, 5: 39, 6: 80, 7: 47, 8: 96, 9: 81, 10: 104}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-n", type=int, default=8)
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()

    for n in range(2, args.max_n + 1):
        t0 = time.monotonic()
        catalog = enumerate_partitions(RunConfig(2, n, jobs=args.jobs))
        wall = time.monotonic() - t0
        known = KNOWN_HEAD.get(n)
        suffix = ""
        if known is not None:
            suffix = "ok" if len(catalog.records) == known else f"MISMATCH (known {known})"
        print(f"n={n:3d}: {len(catalog.records):6d} classes [{wall:8.1f}s] {suffix}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
