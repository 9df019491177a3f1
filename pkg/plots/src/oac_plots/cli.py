"""Command-line chart rendering for simulator output.

Usage: oac-plot --kind {circle,bits,period} --in <csv> --out <img>
       [--alpha v] [--period v] [--variant a|b]

Exit codes: 0 success, 2 bad arguments, missing/invalid input, or empty
selection.
"""

from __future__ import annotations

import argparse
import sys

from .render import (
    EmptySelectionError,
    FigureKind,
    PlotSpec,
    SchemaError,
    render,
)

EXIT_OK = 0
EXIT_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oac-plot",
        description="Render simulator sweep CSVs and codebook dumps as charts.",
    )
    parser.add_argument("--kind", required=True,
                        choices=[kind.value for kind in FigureKind])
    parser.add_argument("--in", dest="input_path", required=True,
                        metavar="CSV", help="sweep CSV, or a codebook dump "
                                            "for --kind circle")
    parser.add_argument("--out", dest="output_path", required=True,
                        metavar="IMG", help="output image (.png or .svg)")
    parser.add_argument("--variant", choices=("a", "b"), default=None)
    parser.add_argument("--alpha", type=float, default=None)
    parser.add_argument("--period", type=int, default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    spec = PlotSpec(
        input_path=args.input_path,
        kind=FigureKind(args.kind),
        output_path=args.output_path,
        variant=args.variant,
        alpha=args.alpha,
        period=args.period,
    )
    try:
        summary = render(spec)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SchemaError, EmptySelectionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"wrote {summary.output_path} "
          f"({summary.series} series, {summary.points} points)")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
