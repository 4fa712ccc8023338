# cycleweights/commands/expansions.py
import argparse
import logging

from cycleweights.asymptotics import partial_sum_asymp, polylog_asymp
from cycleweights.errors import EXIT_OK
from cycleweights.schemas import ExpansionKind, RunConfig
from cycleweights.utils import output_stream, parse_grid, write_csv

logger = logging.getLogger(__name__)

POLYLOG_COLUMNS = ("delta", "v", "direct", "approx", "abs_error")
PARTIAL_COLUMNS = ("delta", "v", "x", "direct", "approx", "abs_error", "integral", "boundary", "in_regime")


def add_parser(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("expansions", parents=parents, help="asymptotic expansion sweeps as CSV")
    parser.add_argument("--kind", choices=[k.value for k in ExpansionKind], help="full sums or tails")
    parser.add_argument("--deltas", type=parse_grid, help="exponents delta, e.g. 0,0.5,1")
    parser.add_argument("--v-grid", dest="v_grid", type=parse_grid, help="values of v in (0, 1)")
    parser.add_argument("--xv-grid", dest="xv_grid", type=parse_grid, help="tail starts as multiples x*v")
    parser.add_argument("--terms", type=int, help="terms of the falling-factorial series")
    return parser


def polylog_rows(config: RunConfig):
    for delta in config.deltas:
        for v in config.v_grid:
            res = polylog_asymp(delta, v)
            if res.abs_error > v:
                logger.warning("delta=%g v=%g: error %.3g exceeds v", delta, v, res.abs_error)
            yield (float(delta), float(v), res.direct, res.approx, res.abs_error)


def partial_rows(config: RunConfig):
    for delta in config.deltas:
        for v in config.v_grid:
            for xv in config.xv_grid:
                x = xv / v
                res = partial_sum_asymp(delta, v, x, config.terms)
                approx = res.integral_part + res.correction
                yield (
                    float(delta), float(v), float(x), res.direct, approx, abs(res.remainder),
                    res.integral_part, res.correction, int(res.in_regime),
                )


def run(config: RunConfig) -> int:
    if config.kind == ExpansionKind.POLYLOG:
        header, rows = POLYLOG_COLUMNS, polylog_rows(config)
    else:
        header, rows = PARTIAL_COLUMNS, partial_rows(config)
    with output_stream(config.out) as out:
        write_csv(out, header, rows)
    return EXIT_OK
