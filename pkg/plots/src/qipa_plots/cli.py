"""Command-line figure renderer: ``plot <figure-kind> --in ... --out ...``."""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, FigureSpec, SchemaError, render

EXIT_OK = 0
EXIT_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="plot",
        description="Render a figure from solver trace/sweep/solutions CSVs.",
    )
    ap.add_argument("kind", choices=KINDS)
    ap.add_argument(
        "--in",
        dest="inputs",
        nargs="+",
        required=True,
        metavar="CSV",
        help="input CSV file(s); one per series",
    )
    ap.add_argument("--out", required=True, help="output image (.png or .svg)")
    ap.add_argument(
        "--labels",
        nargs="+",
        default=[],
        help="series labels (defaults to each input's directory name)",
    )
    ap.add_argument("--title", default="")
    ap.add_argument(
        "--linear-errors",
        action="store_true",
        help="plot error panels on a linear axis instead of log",
    )
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(
            kind=args.kind,
            inputs=tuple(args.inputs),
            out=args.out,
            labels=tuple(args.labels),
            title=args.title,
            log_errors=not args.linear_errors,
        )
        out = render(spec)
    except (SchemaError, ValueError, OSError) as exc:
        print(f"plot: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(out)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
