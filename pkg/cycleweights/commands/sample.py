# cycleweights/commands/sample.py
import argparse
import logging

from cycleweights.errors import EXIT_OK
from cycleweights.htable_cache import load_or_build
from cycleweights.sampler import SamplerCounters, sample_batch, write_samples
from cycleweights.schemas import RunConfig, SamplerConfig
from cycleweights.utils import (
    add_cache_arguments,
    add_family_arguments,
    add_sampling_arguments,
    output_stream,
    weight_from_config,
)

logger = logging.getLogger(__name__)


def add_parser(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("sample", parents=parents, help="dump sampled cycle types as JSON lines")
    add_family_arguments(parser)
    add_sampling_arguments(parser)
    add_cache_arguments(parser)
    return parser


def run(config: RunConfig) -> int:
    w = weight_from_config(config)
    table = load_or_build(w, config.n, config.cache_dir, build=config.build)
    counters = SamplerCounters()
    cfg = SamplerConfig(n=config.n, num_samples=config.samples, seed=config.seed, workers=config.workers)
    with output_stream(config.out) as out:
        written = write_samples(sample_batch(w, table, cfg, counters), out)
    logger.info(
        "wrote %d cycle types; mean scan length %.1f, %d numeric incidents",
        written, counters.mean_scan, counters.incidents,
    )
    return EXIT_OK
