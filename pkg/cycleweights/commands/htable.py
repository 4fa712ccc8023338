# cycleweights/commands/htable.py
import argparse
import json
import logging

from cycleweights.errors import EXIT_OK
from cycleweights.htable_cache import cache_path, load_or_build
from cycleweights.schemas import RunConfig
from cycleweights.utils import add_cache_arguments, add_family_arguments, output_stream, weight_from_config

logger = logging.getLogger(__name__)


def add_parser(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("htable", parents=parents, help="build or extend the cached HTable")
    add_family_arguments(parser)
    parser.add_argument("--n-max", dest="n_max", type=int, help="largest n to tabulate")
    add_cache_arguments(parser)
    return parser


def run(config: RunConfig) -> int:
    """Построение / загрузка таблицы h_0..h_{n_max}"""
    w = weight_from_config(config)
    table = load_or_build(w, config.n_max, config.cache_dir, build=config.build)
    summary = {
        "weights": w.label,
        "n_max": table.n_max,
        "path": str(cache_path(w, config.cache_dir)),
        "log_h_n_max": float(table.log_h[config.n_max]),
    }
    with output_stream(config.out) as out:
        out.write(json.dumps(summary, indent=2) + "\n")
    return EXIT_OK
