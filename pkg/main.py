import argparse
import json
import logging
import sys
from typing import Any, Optional, Sequence

from commands import eig, oracle, schema, solve, sweep, verify
from exact import ConstraintViolation
from exceptions import CommandError, UsageError

logger = logging.getLogger("pcoulomb")

COMMANDS = (solve, verify, oracle, eig, sweep, schema)


class CLIParser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad arguments; here that status means a constraint violation."""

    def error(self, message: str):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = CLIParser(
        prog="pcoulomb",
        description="Exact solutions of -a/r + br + cr² in N dimensions, with numerical cross-checks",
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging on stderr")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def _error(message: str, code: int, data: Optional[dict[str, Any]] = None) -> int:
    envelope = {"IsSuccess": False, "message": message, "data": data or {}}
    sys.stderr.write(json.dumps(envelope) + "\n")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _error(exc.detail, exc.exit_code)
    except SystemExit as exc:
        # --help
        return int(exc.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )

    try:
        return args.handler(args)
    except CommandError as exc:
        return _error(exc.detail, exc.exit_code, exc.data)
    except ConstraintViolation as exc:
        return _error(str(exc), 2, {
            "violation": exc.violation,
            "relative": exc.relative,
            "b_required": exc.b_required,
        })
    except ValueError as exc:
        logger.debug("bad input", exc_info=True)
        return _error(str(exc), 1)


if __name__ == "__main__":
    sys.exit(main())
