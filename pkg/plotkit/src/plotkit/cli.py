"""Command-line wrapper: ``plotkit <kind> --in results.csv --out fig.png``."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .render import PLOT_KINDS, ColumnError, PlotSpec, dump_table, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotkit", description=__doc__.splitlines()[0]
    )
    parser.add_argument("kind", choices=PLOT_KINDS)
    parser.add_argument("--in", dest="source", required=True, metavar="CSV",
                        help="benchmark result table to read")
    parser.add_argument("--out", metavar="PNG", help="figure file to write")
    parser.add_argument("--molecule", help="keep only rows for this molecule")
    parser.add_argument("--sector", help="keep only rows for this sector label")
    parser.add_argument("--dump-table", action="store_true",
                        help="print the plotted values verbatim instead of rendering")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if not args.dump_table and args.out is None:
        print("plotkit: error: --out is required unless --dump-table is given",
              file=sys.stderr)
        return 2
    spec = PlotSpec(
        source=args.source,
        kind=args.kind,
        out=args.out or "figure.png",
        molecule=args.molecule,
        sector=args.sector,
    )
    try:
        if args.dump_table:
            sys.stdout.write(dump_table(spec))
        else:
            path = render(spec)
            print(f"wrote {path}", file=sys.stderr)
    except ColumnError as exc:
        print(f"plotkit: error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"plotkit: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"plotkit: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
