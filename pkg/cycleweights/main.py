# cycleweights/main.py
import argparse
import logging
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from cycleweights.commands import expansions, htable, oracle, saddle, sample, verify
from cycleweights.config import settings
from cycleweights.errors import EXIT_OK, EXIT_VALIDATION, CycleWeightsError, NumericError
from cycleweights.schemas import Command, RunConfig, Tolerances
from cycleweights.utils import parse_tolerance_overrides

logger = logging.getLogger("cycleweights")

COMMANDS = {
    Command.HTABLE: htable,
    Command.ORACLE: oracle,
    Command.SADDLE: saddle,
    Command.SAMPLE: sample,
    Command.VERIFY: verify,
    Command.EXPANSIONS: expansions,
}

# argparse bookkeeping that is not part of RunConfig
_PARSER_ONLY = {"handler", "verbose", "tol"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the artifact here instead of stdout")
    common.add_argument("--tol", action="append", metavar="KEY=VALUE", help="override a verification tolerance")
    common.add_argument("--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(
        prog="cycleweights",
        description="Random permutations under polynomial cycle weights: exact tables, sampling, asymptotics.",
        allow_abbrev=False,
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    # Include commands
    for module in COMMANDS.values():
        sub = module.add_parser(subparsers, [common])
        sub.set_defaults(handler=module.run)
    return parser


def configure_logging(verbose: bool = False) -> None:
    level = logging.DEBUG if verbose else getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO)
    logging.basicConfig(stream=sys.stderr, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    logging.getLogger().setLevel(level)


def make_run_config(ns: argparse.Namespace) -> RunConfig:
    fields = {k: v for k, v in vars(ns).items() if k not in _PARSER_ONLY and v is not None}
    tolerances = Tolerances().with_overrides(parse_tolerance_overrides(ns.tol))
    return RunConfig(tolerances=tolerances, **fields)


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, run one command and map failures to exit codes.

    0 when every requested check passes, 1 when a check fails, 2 on
    validation, capacity or cache errors, 3 on numeric failures.
    """
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_VALIDATION

    configure_logging(ns.verbose)
    try:
        config = make_run_config(ns)
        logger.debug("run config: %s", config.config_echo())
        return ns.handler(config)
    except ValidationError as e:
        logger.error("invalid configuration:\n%s", e)
        return EXIT_VALIDATION
    except NumericError as e:
        logger.error("%s", e.detail)
        if e.trace:
            logger.error("iteration trace: %s", ", ".join(f"{v:.17g}" for v in e.trace))
        return e.exit_code
    except CycleWeightsError as e:
        logger.error("%s", e.detail)
        return e.exit_code


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
