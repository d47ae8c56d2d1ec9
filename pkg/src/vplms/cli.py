"""Command-line entry point for the Monte-Carlo identification experiments."""

from __future__ import annotations

import argparse
import logging
import sys

from .experiment import ConfigError, parse_config, run_experiment


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vplms",
        description=(
            "Sparse system identification benchmark: runs seeded Monte-Carlo "
            "comparisons of the LMS family with p-norm zero attractors and "
            "variable norm order, writing per-sparsity trace CSVs, a summary, "
            "the resolved configuration and figures."
        ),
    )
    parser.add_argument("--config", metavar="FILE", help="INI config file; flags override it")
    parser.add_argument("--taps", type=int, help="filter length N (default 16)")
    parser.add_argument(
        "--nonzero", type=int, action="append", metavar="S",
        help="sparsity level; repeatable (default 1 4 8 16)",
    )
    parser.add_argument("--iters", type=int, help="signal length L (default 500)")
    parser.add_argument("--snr-db", type=float, dest="snr_db", help="SNR in dB (default 20)")
    parser.add_argument("--runs", type=int, help="Monte-Carlo runs per level (default 200)")
    parser.add_argument("--seed", type=int, help="base seed")
    parser.add_argument(
        "--algos", help="comma-separated algorithm names (default: all six)"
    )
    parser.add_argument("--out-dir", dest="out_dir", help="output directory (default results)")
    parser.add_argument("--tail-window", type=int, dest="tail_window",
                        help="steady-state window length (default 50)")
    parser.add_argument("--workers", type=int, default=1,
                        help="parallel worker processes (default 1)")
    parser.add_argument("--figures", action=argparse.BooleanOptionalAction, default=True,
                        help="render figures next to the CSVs (default on)")
    parser.add_argument("-v", "--verbose", action="store_true", help="chatty progress output")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(message)s",
    )
    overrides = {
        "taps": args.taps,
        "nonzero": args.nonzero,
        "iters": args.iters,
        "snr_db": args.snr_db,
        "runs": args.runs,
        "seed": args.seed,
        "algos": args.algos,
        "out_dir": args.out_dir,
        "tail_window": args.tail_window,
    }
    try:
        config = parse_config(args.config, overrides)
        if args.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {args.workers}")
        paths = run_experiment(config, workers=args.workers, figures=args.figures)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"vplms: error: {exc}", file=sys.stderr)
        return 2
    for s, p in paths["traces"].items():
        print(f"traces  s={s}: {p}")
    print(f"summary: {paths['summary']}")
    print(f"config:  {paths['config']}")
    for p in paths["figures"]:
        print(f"figure:  {p}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
