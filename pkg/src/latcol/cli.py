"""Command-line interface.

Exit codes: 0 on success, 2 when verification finds a mismatch, 3 when a
search budget is exhausted.  The node budget of the subgroup searches can be
overridden with the LATCOL_NODE_BUDGET environment variable.
"""

from __future__ import annotations

import argparse
import sys

from latcol import __version__
from latcol.catalog import (BudgetExhausted, Catalog, RunConfig,
                            enumerate_node_transitive, enumerate_partitions,
                            render_svg, report_tables, two_step_enumerate,
                            verify_catalog)

EXIT_OK = 0
EXIT_MISMATCH = 2
EXIT_BUDGET = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latcol",
        description="Enumerate and analyse orbit colourings of cubic lattices.")
    parser.add_argument("--version", action="version", version=f"latcol {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="catalog of partitions into N orbits")
    p.add_argument("--dim", type=int, required=True, choices=(1, 2, 3, 4))
    p.add_argument("--orbits", type=int, required=True)
    p.add_argument("--max-index", type=int, default=None,
                   help="override the index bound (default: orbits * 2^d d!)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("transitive", help="census of node-transitive subgroups")
    p.add_argument("--dim", type=int, required=True, choices=(1, 2, 3, 4))
    p.add_argument("--long-run", action="store_true",
                   help="required for the d=4 census")
    p.add_argument("--out", default=None,
                   help="optional JSON file of group generators")

    p = sub.add_parser("d4-two-orbit", help="two-step two-orbit run for d=4")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--long-run", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)

    p = sub.add_parser("verify", help="re-derive and check a catalog file")
    p.add_argument("catalog")

    p = sub.add_parser("render", help="render a d=2 record as an SVG grid")
    p.add_argument("--catalog", required=True)
    p.add_argument("--id", required=True, help="certificate hex prefix")
    p.add_argument("--window", type=int, default=12)
    p.add_argument("--out", required=True)

    p = sub.add_parser("report", help="text table of a catalog")
    p.add_argument("--catalog", required=True)
    return parser


def _load_catalog(path: str) -> Catalog:
    with open(path) as fh:
        return Catalog.loads(fh.read())


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except BudgetExhausted as exc:
        print(f"latcol: {exc}", file=sys.stderr)
        return EXIT_BUDGET


def _dispatch(args) -> int:
    if args.command == "enumerate":
        cfg = RunConfig(dimension=args.dim, orbits=args.orbits,
                        max_index=args.max_index, jobs=args.jobs)
        catalog = enumerate_partitions(cfg)
        with open(args.out, "w") as fh:
            fh.write(catalog.dumps())
        print(f"{len(catalog.records)} partition classes -> {args.out}")
        return EXIT_OK

    if args.command == "transitive":
        groups = enumerate_node_transitive(args.dim, long_run=args.long_run)
        print(f"node-transitive subgroup classes of the {args.dim}-dimensional "
              f"lattice: {len(groups)}")
        if args.out:
            import json
            with open(args.out, "w") as fh:
                json.dump([g.to_json() for g in groups], fh, sort_keys=True)
            print(f"generators -> {args.out}")
        return EXIT_OK

    if args.command == "d4-two-orbit":
        catalog = two_step_enumerate(4, 2, checkpoint=args.checkpoint,
                                     long_run=args.long_run, jobs=args.jobs)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(catalog.dumps())
        print(f"{len(catalog.records)} two-orbit classes for d=4")
        return EXIT_OK

    if args.command == "verify":
        report = verify_catalog(_load_catalog(args.catalog))
        if report.ok:
            print(f"catalog OK ({report.checks} records checked)")
            return EXIT_OK
        for line in report.mismatches:
            print(f"MISMATCH {line}")
        return EXIT_MISMATCH

    if args.command == "render":
        catalog = _load_catalog(args.catalog)
        matches = [r for r in catalog.records
                   if r.certificate.hex().startswith(args.id.lower())]
        if len(matches) != 1:
            print(f"certificate prefix {args.id!r} matches {len(matches)} records",
                  file=sys.stderr)
            return EXIT_MISMATCH
        svg = render_svg(matches[0], args.window)
        with open(args.out, "w") as fh:
            fh.write(svg)
        print(f"wrote {args.out}")
        return EXIT_OK

    if args.command == "report":
        print(report_tables(_load_catalog(args.catalog)), end="")
        return EXIT_OK

    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
