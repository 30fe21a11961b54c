"""`plots` command: render run-directory figures, failing loudly on bad CSVs."""
from __future__ import annotations

import argparse
import sys

from .io import PlotInputError
from .render import PlotSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots", description="Render trajectory and heat-map figures from a run directory")
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="run directory with traj_/heatmap_/truth_ CSVs")
    parser.add_argument("--which", choices=["trajectories", "heatmaps", "all"],
                        default="all")
    parser.add_argument("--out", dest="out_dir",
                        help="image output directory (default: the input directory)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = PlotSpec(args.in_dir, args.which, args.out_dir)
    try:
        written = render(spec)
    except PlotInputError as exc:
        print(f"plots: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
