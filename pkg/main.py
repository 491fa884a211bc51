import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from src.commands.runner import COMMAND_MODULES, run
from src.commands.utils import config_from_args
from src.conf.config import TOOL_NAME, TOOL_VERSION
from src.errors import ConfigError, DataIOError, DataValidationError, InverseStatsError

logger = logging.getLogger(TOOL_NAME)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=TOOL_NAME, description="Inverse statistics of daily price indices")
    parser.add_argument("--version", action="version", version=f"%(prog)s {TOOL_VERSION}")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")

    # every command module contributes its own subparser
    subparsers = parser.add_subparsers(dest="command_name", required=True, metavar="COMMAND")
    for module in COMMAND_MODULES:
        module.register(subparsers)
    return parser


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)
    # numba's compiler logs at DEBUG
    logging.getLogger("numba").setLevel(logging.WARNING)


def report_error(exc: InverseStatsError) -> int:
    logger.error("%s error: %s", exc.category, exc.detail)
    print(json.dumps(exc.to_dict(), sort_keys=True), file=sys.stderr)
    return exc.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        # flag defaults come from the environment settings
        parser = build_parser()
    except ConfigError as e:
        configure_logging()
        return report_error(e)
    args = parser.parse_args(argv)
    configure_logging(args.verbose, args.quiet)

    try:
        config = config_from_args(args)
    except ConfigError as e:
        return report_error(e)

    try:
        return run(config)
    except InverseStatsError as e:
        return report_error(e)
    except ValidationError as e:
        # a domain invariant failed while building a value from the data
        return report_error(DataValidationError(str(e.errors()[0]["msg"])))
    except OSError as e:
        return report_error(DataIOError(str(e)))


def cli() -> None:
    sys.exit(main())


if __name__ == "__main__":
    cli()
