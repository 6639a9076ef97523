"""Command line interface.

Subcommands ``subspace``, ``sumrate``, and ``runtime`` run one experiment
each and write its delimited output to --out; --plot additionally renders
the matching figure to an image file. Exit codes: 0 success, 2
configuration error, 3 infeasible geometry, 4 numerical degeneracy.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .config import load_config
from .errors import ConfigError, DegeneracyError, InfeasibilityError
from .experiments import RUNNERS
from .output import emit_results

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_DEGENERATE = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tenprec",
        description="Link-level massive MIMO simulator with tensor precoding")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("subspace", "dominant channel subspace evolution along UE tracks"),
            ("sumrate", "TDD sum rate with CSI aging for all precoders"),
            ("runtime", "per-design precoder construction runtime ECDF")):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", metavar="PATH", default=None,
                         help="JSON scenario file ('-' for stdin; omit for defaults)")
        cmd.add_argument("--seed", type=int, default=None, metavar="U64",
                         help="override the configured RNG seed")
        cmd.add_argument("--out", metavar="PATH", required=True,
                         help="output file for the experiment records")
        cmd.add_argument("--format", choices=("csv", "json"), default="csv",
                         help="output format (default csv)")
        cmd.add_argument("--plot", metavar="PATH", default=None,
                         help="also render the matching figure to this image file")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("seed must be a non-negative integer")
            cfg = replace(cfg, seed=args.seed)
        result = RUNNERS[args.command](cfg)
        emit_results(result, args.format, args.out)
        if args.plot:
            from .plotting import render_figure

            render_figure(result, args.plot)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibilityError as exc:
        print(f"infeasible scenario: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except DegeneracyError as exc:
        print(f"numerical degeneracy: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
