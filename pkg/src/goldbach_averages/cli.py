"""Command-line entry point.

    goldbach-averages <command> [options]

Commands: sieve, goldbach, explicit-formula, error-scaling,
character-moments, identity-suite.  Reports go to --out (or stdout) in CSV
or TSV with a verdict footer; the exit code is 0 when all verdicts pass,
1 when any fails, and 2 for usage, parse, or resource errors.
"""

from __future__ import annotations

import argparse
import os
import sys

from .arithmetic import CapacityError
from .experiments import RUNNERS, ExperimentConfig
from .reports import render_figure
from .zeros import ZeroTableParseError

#: Environment variable consulted when --zeros is not given.
ZEROS_ENV_VAR = "GOLDBACH_AVERAGES_ZEROS"


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}"
        ) from None


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated numbers, got {text!r}"
        ) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="goldbach-averages",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, runner in RUNNERS.items():
        p = sub.add_parser(name, help=runner.__doc__.splitlines()[0])
        p.add_argument("--n-max", type=int, default=None,
                       help="table size for commands that build one table")
        p.add_argument("--n-grid", type=_int_list, default=(),
                       help="comma-separated N values (default: geometric)")
        p.add_argument("--q-set", type=_int_list, default=(),
                       help="comma-separated moduli q")
        p.add_argument("--x-grid", type=_float_list, default=(),
                       help="comma-separated X values for moment integrals")
        p.add_argument("--zeros", default=None,
                       help=f"zero table path (default ${ZEROS_ENV_VAR})")
        p.add_argument("--height", type=float, default=None,
                       help="truncate the zero sum at this ordinate")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for the randomized checks (default 0)")
        p.add_argument("--cache", default=None,
                       help="write the psi2 binary cache to this path")
        p.add_argument("--out", default=None,
                       help="report file (default: stdout)")
        p.add_argument("--format", choices=("csv", "tsv"), default="csv")
        p.add_argument("--figures", action="store_true",
                       help="also render a PNG figure next to --out")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    zeros_path = args.zeros or os.environ.get(ZEROS_ENV_VAR)
    config = ExperimentConfig(
        command=args.command,
        n_max=args.n_max,
        n_values=args.n_grid,
        q_values=args.q_set,
        x_values=args.x_grid,
        height=args.height,
        zero_table_path=zeros_path,
        seed=args.seed,
        cache_path=args.cache,
    )
    if args.figures and not args.out:
        parser.error("--figures requires --out")

    try:
        report = RUNNERS[args.command](config)
    except (CapacityError, ZeroTableParseError, ValueError, OSError) as exc:
        print(f"goldbach-averages: error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"goldbach-averages: invariant violated: {exc}", file=sys.stderr)
        return 1

    if args.out:
        report.write(args.out, args.format)
        if args.figures:
            fig = render_figure(report, args.out)
            if fig is not None:
                print(f"figure written to {fig}", file=sys.stderr)
    else:
        sys.stdout.write(report.render(args.format))
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
