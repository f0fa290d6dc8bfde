#!/usr/bin/env python3
"""Reproduce the desk-scale partition counts and censuses in one sweep.

Writes catalogs next to this script (or under --out-dir) and prints a
summary table.  The full run takes a couple of minutes, dominated by the
three-dimensional two-orbit enumeration.
"""

import argparse
import pathlib
import sys
import time

from latcol.catalog import RunConfig, enumerate_partitions, enumerate_node_transitive

EXPECTED = {
    (1, 2): 3,
    (2, 2): 9, (2, 3): 22, (2, 4): 44, (2, 5): 39, (2, 6): 80,
    (3, 2): 25,
}
CENSUS = {1: 3, 2: 36, 3: 786}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default=None)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--skip-d3", action="store_true",
                        help="skip the minute-scale d=3 runs")
    args = parser.parse_args()
    out_dir = pathlib.Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)

    failures = 0
    for (d, n), expected in EXPECTED.items():
        if args.skip_d3 and d == 3:
            continue
        t0 = time.monotonic()
        catalog = enumerate_partitions(RunConfig(d, n, jobs=args.jobs))
        wall = time.monotonic() - t0
        ok = len(catalog.records) == expected
        failures += not ok
        print(f"d={d} n={n}: {len(catalog.records):5d} classes "
              f"(expected {expected:5d}) {'ok' if ok else 'MISMATCH'} "
              f"[{wall:6.1f}s]")
        if out_dir:
            (out_dir / f"catalog_d{d}_n{n}.json").write_text(catalog.dumps())

    for d, expected in CENSUS.items():
        if args.skip_d3 and d == 3:
            continue
        t0 = time.monotonic()
        groups = enumerate_node_transitive(d)
        wall = time.monotonic() - t0
        ok = len(groups) == expected
        failures += not ok
        print(f"d={d} node-transitive census: {len(groups):5d} "
              f"(expected {expected:5d}) {'ok' if ok else 'MISMATCH'} "
              f"[{wall:6.1f}s]")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
