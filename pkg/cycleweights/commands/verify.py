# cycleweights/commands/verify.py
import argparse
import logging

from cycleweights import stats
from cycleweights.asymptotics import solve_saddle
from cycleweights.errors import EXIT_CHECK_FAILED, EXIT_OK
from cycleweights.htable_cache import load_or_build
from cycleweights.sampler import SamplerCounters, sample_batch
from cycleweights.schemas import Experiment, RunConfig, SamplerConfig
from cycleweights.utils import (
    add_cache_arguments,
    add_family_arguments,
    add_sampling_arguments,
    output_stream,
    parse_grid,
    weight_from_config,
)

logger = logging.getLogger(__name__)


def add_parser(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("verify", parents=parents, help="Monte Carlo check of a limit theorem")
    parser.add_argument("experiment", choices=[e.value for e in Experiment])
    add_family_arguments(parser)
    add_sampling_arguments(parser)
    parser.add_argument("--y-grid", dest="y_grid", type=parse_grid, help="e.g. 0.5,1,2")
    parser.add_argument("--x-grid", dest="x_grid", type=parse_grid, help="profile points in units of n^{1/(1+alpha)}")
    parser.add_argument("--k-longest", dest="k_longest", type=int, help="number of longest cycles")
    add_cache_arguments(parser)
    return parser


def run(config: RunConfig) -> int:
    w = weight_from_config(config)
    sd = solve_saddle(w, config.n)
    table = load_or_build(w, config.n, config.cache_dir, build=config.build)
    counters = SamplerCounters()
    cfg = SamplerConfig(n=config.n, num_samples=config.samples, seed=config.seed, workers=config.workers)
    batch = list(sample_batch(w, table, cfg, counters))
    logger.info("sampled %d cycle types, mean scan length %.1f", counters.samples, counters.mean_scan)

    tol = config.tolerances
    if config.experiment == Experiment.POISSON:
        report = stats.verify_poisson_increments(batch, sd, config.y_grid, tol)
    elif config.experiment == Experiment.GUMBEL:
        report = stats.verify_gumbel(batch, sd, config.k_longest, tol)
    elif config.experiment == Experiment.PROFILE:
        report = stats.cumulative_profile(batch, w.growth_exponent, config.x_grid, sd, tol)
    else:
        report = stats.bn_event_frequency(batch, sd, tol)

    report = report.model_copy(update={
        "config": {**config.config_echo(), **report.config},
        "counts": {**report.counts, "sampler_incidents": counters.incidents},
    })
    with output_stream(config.out) as out:
        out.write(report.to_json() + "\n")

    if not report.passed:
        for check in report.failed_checks():
            logger.error("check %s failed: observed %.6g, target %.6g ± %.3g", check.name, check.observed, check.target, check.tol)
        return EXIT_CHECK_FAILED
    return EXIT_OK
