"""Command-line figure generation from harness CSV outputs."""

from __future__ import annotations

import argparse
import sys

from .figures import FigureSpec, plot_regret_curve, plot_reward_trace


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="im-plots",
        description="Render reward-trace and regret-vs-horizon figures from imbandit CSVs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    trace = sub.add_parser("reward-trace", help="moving-average reward vs round",
                           formatter_class=fmt)
    trace.add_argument("--rounds", nargs="+", required=True, help="per-round CSV files")
    trace.add_argument("--window", type=int, default=100, help="moving-average window")
    trace.add_argument("--units", default="raw", choices=("raw", "normalized"))
    trace.add_argument("--out", required=True, help="output image (.svg default, .png raster)")

    regret = sub.add_parser("regret", help="cumulative regret vs horizon",
                            formatter_class=fmt)
    regret.add_argument("--aggregate", required=True, help="aggregate CSV file")
    regret.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "reward-trace":
            spec = FigureSpec(inputs=list(args.rounds), kind="reward-trace",
                              output=args.out, window=args.window, units=args.units)
            path = plot_reward_trace(spec)
        else:
            spec = FigureSpec(inputs=[args.aggregate], kind="regret-vs-horizon",
                              output=args.out)
            path = plot_regret_curve(spec)
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
