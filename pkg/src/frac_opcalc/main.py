"""Command-line entry point."""

import argparse
import logging
import shlex
import sys
from collections.abc import Sequence
from pathlib import Path

from pydantic import ValidationError

from frac_opcalc import __version__
from frac_opcalc.commands import applications, functions
from frac_opcalc.commands.common import common_options
from frac_opcalc.config import get_settings
from frac_opcalc.exceptions import FracOpcalcError
from frac_opcalc.services.export_service import ExportService, OutputFormat

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3


def create_parser() -> argparse.ArgumentParser:
    """Top-level parser with one sub-command per function or model."""
    parser = argparse.ArgumentParser(
        prog="frac-opcalc",
        description="Operational solutions of linear fractional differential equations",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  frac-opcalc ml --gamma 1 --zeta 1 --x 1
  frac-opcalc heatpoly --nu 1 --beta 2 --x 1 --t 1
  frac-opcalc fpp-pmf --nu 1 --rate 1 --t 1 --kmax 5
  frac-opcalc subordination --nu 0.5 --alpha 1 --t 0.25:4:8 --format json
  frac-opcalc --args-file run.args
        """,
    )
    parser.add_argument("--version", action="version", version=__version__)
    subparsers = parser.add_subparsers(dest="command", required=True)
    parents = [common_options()]
    functions.register(subparsers, parents)
    applications.register(subparsers, parents)
    return parser


def expand_args_files(argv: Sequence[str]) -> list[str]:
    """Replace ``--args-file PATH`` by the flags listed in PATH.

    One flag per line; blank lines and lines starting with # are skipped.
    """
    out: list[str] = []
    items = iter(argv)
    for item in items:
        if item == "--args-file" or item.startswith("--args-file="):
            path = item.partition("=")[2] or next(items, "")
            if not path:
                raise argparse.ArgumentTypeError("--args-file needs a path")
            text = Path(path).read_text(encoding="utf-8")
            for line in text.splitlines():
                line = line.strip()
                if line and not line.startswith("#"):
                    out.extend(shlex.split(line))
        else:
            out.append(item)
    return out


def configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else get_settings().log_level.upper()
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def run(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, evaluate the grid and write it; returns the exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = create_parser()
    try:
        args = parser.parse_args(expand_args_files(argv))
    except (argparse.ArgumentTypeError, OSError) as exc:
        sys.stderr.write(f"frac-opcalc: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    configure_logging(args.verbose)
    settings = get_settings()
    workers = args.workers or settings.workers

    try:
        field = args.handler(args, workers)
    except ValidationError as exc:
        sys.stderr.write(f"frac-opcalc: invalid parameters\n{exc}\n")
        return EXIT_USAGE
    except FracOpcalcError as exc:
        logger.error(f"{args.command}: {exc}")
        sys.stderr.write(f"frac-opcalc: {exc}\n")
        return EXIT_DOMAIN

    try:
        ExportService(settings).write(field, OutputFormat(args.format), args.out)
    except OSError as exc:
        sys.stderr.write(f"frac-opcalc: cannot write output: {exc}\n")
        return EXIT_USAGE
    return EXIT_OK


def main() -> None:
    """Console script entry point."""
    sys.exit(run())


if __name__ == "__main__":
    main()
