import argparse
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from . import __version__
from .cli import hv_command, postselect_command, sample_command, sweep_command
from .core.config import settings
from .core.errors import ConfigurationError, DelayedChoiceError
from .core.logging import configure_logging
from .schemas.responses import ErrorRecord

EPILOG = (
    "Angles are radians unless --degrees is given. Defaults come from QDC_* environment variables "
    "(or a .env file); QDC_DEFAULT_SEED overrides the default seed. SOURCE_DATE_EPOCH pins the "
    "manifest timestamp. Exit codes: 0 success, 2 usage or configuration error, 3 degenerate condition."
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="delayed-choice",
        description="Quantum delayed-choice experiment simulator and hidden-variable analysis",
        epilog=EPILOG,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help=f"log level (default: {settings.LOG_LEVEL})")

    commands = parser.add_subparsers(dest="command", required=True)
    sweep_command(commands)
    sample_command(commands)
    hv_command(commands)
    postselect_command(commands)
    return parser


def _report(error: DelayedChoiceError) -> int:
    record = ErrorRecord(error=error.message, code=error.code, exit_code=error.exit_code, details=error.details)
    sys.stderr.write(record.model_dump_json() + "\n")
    return error.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help/--version
        return exc.code if isinstance(exc.code, int) else 0

    logger = configure_logging(args.log_level)
    command = " ".join(filter(None, [args.command, getattr(args, "hv_command", None)]))
    logger.info("Starting %s in %s mode", command, settings.ENVIRONMENT)

    try:
        return args.handler(args)
    except DelayedChoiceError as exc:
        logger.error("%s failed: %s", command, exc.message)
        return _report(exc)
    except ValidationError as exc:
        errors = exc.errors(include_url=False, include_context=False)
        logger.error("%s rejected its input: %s", command, errors)
        return _report(ConfigurationError("invalid input", details={"errors": errors}))
    finally:
        logger.info("Finished %s", command)


if __name__ == "__main__":
    sys.exit(main())
