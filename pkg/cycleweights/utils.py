# cycleweights/utils.py
import argparse
import csv
import sys
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, TextIO

from cycleweights.errors import DomainError
from cycleweights.schemas import RunConfig
from cycleweights.weights import WeightSequence


def parse_grid(text: str) -> List[float]:
    """'0.5,1,2' -> [0.5, 1.0, 2.0]"""
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise DomainError(f"cannot parse grid {text!r}; expected comma-separated numbers")


def parse_tolerance_overrides(items: Optional[Sequence[str]]) -> Dict[str, float]:
    overrides: Dict[str, float] = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise DomainError(f"--tol expects key=value, got {item!r}")
        try:
            overrides[key.strip()] = float(value)
        except ValueError:
            raise DomainError(f"--tol {key}: {value!r} is not a number")
    return overrides


def weight_from_config(config: RunConfig) -> WeightSequence:
    if config.alpha is not None:
        return WeightSequence.polynomial(config.alpha)
    return WeightSequence.ewens(config.vartheta)


def fmt17(value: float) -> str:
    return format(value, ".17g")


def as_fraction(p: float, max_denominator: int = 10 ** 6) -> str:
    return str(Fraction(p).limit_denominator(max_denominator))


@contextmanager
def output_stream(out: Optional[str]) -> Iterator[TextIO]:
    """Файл --out или stdout"""
    if out is None:
        yield sys.stdout
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        yield fh


def write_csv(stream: TextIO, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Header row, then floats at 17 significant digits."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt17(v) if isinstance(v, float) else v for v in row])


# Shared command-line arguments
def add_family_arguments(parser: argparse.ArgumentParser) -> None:
    family = parser.add_argument_group("weights")
    family.add_argument("--alpha", type=float, help="polynomial weights θ_k = k^alpha")
    family.add_argument("--vartheta", type=float, help="Ewens weights θ_k = vartheta")


def add_cache_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--cache-dir", dest="cache_dir", help="HTable cache directory")
    parser.add_argument("--build", action="store_true", help="extend a cached HTable that is too small")


def add_sampling_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, help="permutation size")
    parser.add_argument("--samples", type=int, help="number of samples")
    parser.add_argument("--seed", type=int, help="base seed of the per-sample streams")
    parser.add_argument("--workers", type=int, help="worker processes")
