import argparse
import sys
from typing import List, Optional

from .plot import FigureSpec, plot_summary


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chainfig", description="Benchmark summary plots")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("plot", help="plot a summary CSV")
    p.add_argument("--in", dest="in_path", required=True,
                   help="summary CSV (model,s,n,mean_ms,sem_ms,runs)")
    p.add_argument("--out", dest="out_path", required=True,
                   help="output image (png, svg, pdf, ...)")
    p.add_argument("--logx", action="store_true")
    p.add_argument("--logy", action="store_true")
    p.add_argument("--title", default=None)
    p.add_argument("--xlabel", default="task size s")
    p.add_argument("--ylabel", default="mean simulation time [ms]")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    spec = FigureSpec(in_path=args.in_path, out_path=args.out_path,
                      xlabel=args.xlabel, ylabel=args.ylabel,
                      title=args.title, logx=args.logx, logy=args.logy)
    plot_summary(spec)
    return 0


if __name__ == "__main__":
    sys.exit(main())
