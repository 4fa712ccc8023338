# cycleweights/commands/saddle.py
import argparse
import logging
import math

from cycleweights.asymptotics import admissibility_diagnostics, scale_predictions, solve_saddle
from cycleweights.errors import EXIT_OK
from cycleweights.schemas import RunConfig, SaddleSummary
from cycleweights.utils import add_family_arguments, output_stream, weight_from_config

logger = logging.getLogger(__name__)

DIAGNOSTICS_MIN_N = 100


def add_parser(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("saddle", parents=parents, help="solve the saddle equation and print diagnostics")
    add_family_arguments(parser)
    parser.add_argument("--n", type=int, help="permutation size")
    parser.add_argument("--s", type=float, help="tilt of the cycle counts beyond x_n(y)")
    parser.add_argument("--y", type=float, help="threshold parameter y > 0")
    return parser


def run(config: RunConfig) -> int:
    w = weight_from_config(config)
    sd = solve_saddle(w, config.n)
    diagnostics = None
    if config.n >= DIAGNOSTICS_MIN_N and math.isfinite(sd.ell_n):
        diagnostics = admissibility_diagnostics(w, config.n, config.s, config.y)
    else:
        logger.info("admissibility diagnostics skipped (n=%d, ell_n=%s)", config.n, sd.ell_n)
    summary = SaddleSummary(
        weights=w.label,
        scales=scale_predictions(w, config.n),
        diagnostics=diagnostics,
        **sd.summary(),
    )
    with output_stream(config.out) as out:
        out.write(summary.model_dump_json(indent=2) + "\n")
    return EXIT_OK
