"""Command-line entry point: render figure grids from a results CSV."""

from __future__ import annotations

import argparse
import sys

from .data import MissingColumnsError, curve_stats, grid_stats, load_rows
from .render import render_curves, render_grid


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot-grid",
        description="Render faceted error-rate figures from a results CSV.",
    )
    parser.add_argument("--csv", required=True, help="input results CSV")
    parser.add_argument("--out", required=True, help="output directory for images")
    parser.add_argument(
        "--curves", action="store_true",
        help="also render error-rate-vs-rounds curves per panel",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rows = load_rows(args.csv)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MissingColumnsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if not rows:
        print("error: input CSV has no data rows", file=sys.stderr)
        return 2
    infos = render_grid(grid_stats(rows), args.out)
    if args.curves:
        infos += render_curves(curve_stats(rows), args.out)
    for info in infos:
        print(
            f"wrote {info.path} (noise={info.noise:g}, "
            f"{info.n_panels} panels, {info.n_series} series)"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
