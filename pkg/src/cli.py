# src/cli.py
"""
singpoincare <resolve|poincare|alexander|zeta|equivariant|ideal|oracle> <jobfile>
             [--truncate N] [--seed S] [--format text|json|dot] [--compare]

Exit codes: 0 ok / match, 1 usage or parse error, 2 math-domain error,
3 engine and oracle disagree.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from src import config
from src.errors import ParseError, SingPoincareError
from src.handlers.commands import HANDLERS, Options
from src.handlers.jobfile import load_job
from src.logging_config import setup_logging

logger = logging.getLogger(__name__)

FORMATS = ("text", "json", "dot")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="singpoincare",
                     description="Poincare series and Alexander polynomials from resolution data")
    parser.add_argument("command", choices=sorted(HANDLERS), help="What to compute")
    parser.add_argument("jobfile", help="JSON job file")
    parser.add_argument("--truncate", type=int, default=None,
                        help=f"Total-degree truncation N (default {config.DEFAULT_TRUNCATION})")
    parser.add_argument("--seed", type=int, default=None,
                        help=f"Seed for generic curvette points (default {config.DEFAULT_SEED})")
    parser.add_argument("--format", choices=FORMATS, default=config.OUTPUT_FORMAT,
                        help="Output format; dot only for resolve")
    parser.add_argument("--compare", action="store_true", help="oracle: compare with the engine")
    parser.add_argument("--log-level", default=None, help="Override LOG_LEVEL")
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.truncate is not None and args.truncate < 0:
        raise ParseError("--truncate must be nonnegative")
    if args.format == "dot" and args.command != "resolve":
        raise ParseError("--format dot is only available for resolve")

    job = load_job(args.jobfile)
    result = HANDLERS[args.command](job, Options(args.truncate, args.seed, args.compare))
    logger.info("%s %s -> exit %d", args.command, args.jobfile, result.exit_code)

    if args.format == "json":
        print(json.dumps({"command": args.command, **result.data}, indent=2, default=str))
    elif args.format == "dot":
        print(result.dot)
    else:
        print(result.text)
    return result.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    level = None
    if "--log-level" in argv:
        i = argv.index("--log-level")
        level = argv[i + 1] if i + 1 < len(argv) else None
    setup_logging(level)
    try:
        return run(argv)
    except SingPoincareError as exc:
        print(f"error: {exc}", file=sys.stderr)
        logger.debug("%s", type(exc).__name__, exc_info=True)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
