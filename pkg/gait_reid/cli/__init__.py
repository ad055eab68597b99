"""The gait_reid CLI."""
from __future__ import annotations

import argparse
import importlib
import logging
import sys
from typing import NoReturn, Sequence

from gait_reid._version import version
from gait_reid.errors import GaitError

LOGGER = logging.getLogger(__name__)

EXIT_USAGE = 1
EXIT_DATA = 2

LOG_HANDLER_NAME = "gait_reid.cli"

subcommands = [
    "synth",
    "enroll",
    "identify",
    "features",
    "render_aei",
    "evaluate",
    "sweep",
]


class ArgumentParser(argparse.ArgumentParser):
    """Argument parser that exits with the usage error code."""

    def error(self, message: str) -> NoReturn:
        """Print the usage and exit with the usage error code."""
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_argparser() -> argparse.ArgumentParser:
    """Load subparsers from available subcommands."""
    parser = ArgumentParser(
        prog="gait_reid",
        description="Gait-based person re-identification from silhouette sequences",
    )

    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in subcommands:
        mod_name = f"{__package__}.{command}"
        importlib.import_module(mod_name).create_subparser(subparsers)

    parser.add_argument(
        '--version', action='version', version=version, help="Print package version")
    parser.add_argument('--debug', action='store_true', help="Enable debug logging")

    return parser


def setup_logger(debug: bool = False) -> None:
    """Output all loggers to console with custom format at level INFO or DEBUG."""
    formatter = logging.Formatter('%(asctime)s - %(levelname)s - %(message)s')

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    console_handler.set_name(LOG_HANDLER_NAME)

    # log from all loggers to stderr, stdout is kept for results
    root_logger = logging.getLogger()
    for handler in list(root_logger.handlers):
        if handler.get_name() == LOG_HANDLER_NAME:
            root_logger.removeHandler(handler)
    root_logger.setLevel(logging.INFO)
    root_logger.addHandler(console_handler)

    if debug:
        root_logger.setLevel(logging.DEBUG)


def main(argv: Sequence[str] | None = None) -> None:
    """CLI entry-point."""
    parser = build_argparser()
    args = parser.parse_args(argv)
    setup_logger(debug=args.debug)

    if "func" not in args:
        parser.print_help()
        return

    try:
        args.func(args)
    except (GaitError, OSError) as e:
        LOGGER.error(str(e))
        sys.exit(EXIT_DATA)
    except ValueError as e:
        parser.error(str(e))


if __name__ == "__main__":
    main()
