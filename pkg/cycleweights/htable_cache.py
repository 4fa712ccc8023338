# cycleweights/htable_cache.py
"""Binary disk cache for HTable (little-endian "CWHT" format, version 1)."""
from __future__ import annotations

import logging
import os
import struct
from pathlib import Path
from typing import Optional, Union

import numpy as np

from cycleweights.config import settings
from cycleweights.errors import CacheError, CapacityError, DomainError
from cycleweights.exact_oracle import build_h_table
from cycleweights.models import HTable
from cycleweights.weights import FAMILY_TAGS, Family, WeightSequence

logger = logging.getLogger(__name__)

MAGIC = b"CWHT"
VERSION = 1
HEADER = struct.Struct("<4sIBdQ")
ENTRY_DTYPE = np.dtype([("mantissa", "<f8"), ("exponent", "<i8")])
RESIDUAL_TOL = 1e-10
SAMPLE_FRACTION = 0.01

_TAG_TO_FAMILY = {tag: family for family, tag in FAMILY_TAGS.items()}

PathLike = Union[str, os.PathLike]


def cache_path(w: WeightSequence, cache_dir: Optional[PathLike] = None) -> Path:
    """Имя файла кэша по семейству и параметру"""
    if w.family == Family.TABLE:
        raise DomainError("table weights cannot be cached (no scalar parameter)")
    base = Path(cache_dir or settings.CACHE_DIR)
    return base / f"{w.family.value}-{w.parameter!r}.cwht"


def save_htable(table: HTable, path: PathLike) -> Path:
    w = table.weight
    if w.family == Family.TABLE:
        raise DomainError("table weights cannot be cached (no scalar parameter)")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    entries = np.empty(table.n_max + 1, dtype=ENTRY_DTYPE)
    entries["mantissa"] = table.mantissa
    entries["exponent"] = table.exponent
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, VERSION, FAMILY_TAGS[w.family], w.parameter, table.n_max))
        fh.write(entries.tobytes())
    os.replace(tmp, path)
    logger.info("saved HTable %s n_max=%d to %s", w.label, table.n_max, path)
    return path


def validate_sample(table: HTable, fraction: float = SAMPLE_FRACTION, seed: Optional[int] = None) -> int:
    """Проверка рекуррентного остатка на случайной выборке индексов"""
    if table.n_max < 1:
        return 0
    rng = np.random.default_rng(settings.REFERENCE_SEED if seed is None else seed)
    size = max(1, int(round(fraction * table.n_max)))
    indices = np.unique(rng.integers(1, table.n_max + 1, size=size))
    for n in indices.tolist():
        res = table.relative_residual(n)
        if not res <= RESIDUAL_TOL:
            raise CacheError(f"HTable recurrence residual {res:.3g} at n={n} exceeds {RESIDUAL_TOL}")
    return int(indices.size)


def load_htable(path: PathLike) -> HTable:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except FileNotFoundError:
        raise CacheError(f"no HTable cache at {path}")
    if len(raw) < HEADER.size:
        raise CacheError(f"{path} is too short to be an HTable cache")
    magic, version, tag, parameter, n_max = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise CacheError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise CacheError(f"{path}: unsupported version {version}")
    if tag not in _TAG_TO_FAMILY or _TAG_TO_FAMILY[tag] == Family.TABLE:
        raise CacheError(f"{path}: unknown family tag {tag}")
    expected = HEADER.size + (n_max + 1) * ENTRY_DTYPE.itemsize
    if len(raw) != expected:
        raise CacheError(f"{path}: expected {expected} bytes, found {len(raw)}")
    entries = np.frombuffer(raw, dtype=ENTRY_DTYPE, offset=HEADER.size)
    try:
        table = HTable(
            weight=WeightSequence(_TAG_TO_FAMILY[tag], parameter),
            n_max=int(n_max),
            mantissa=entries["mantissa"].astype(np.float64),
            exponent=entries["exponent"].astype(np.int64),
        )
    except DomainError as e:
        raise CacheError(f"{path}: {e.detail}")
    checked = validate_sample(table)
    logger.info("loaded HTable %s n_max=%d from %s (%d residuals checked)", table.weight.label, n_max, path, checked)
    return table


def load_or_build(
    w: WeightSequence,
    n: int,
    cache_dir: Optional[PathLike] = None,
    build: bool = False,
    persist: bool = True,
) -> HTable:
    """HTable покрывающая n: из кэша, либо построенная заново.

    A cache that exists but stops short of n is an error unless build is set;
    a missing cache is built and, with persist, written.
    """
    if w.family == Family.TABLE:
        return build_h_table(w, n)
    path = cache_path(w, cache_dir)
    if path.exists():
        table = load_htable(path)
        if table.weight != w:
            raise CacheError(f"{path} holds {table.weight.label}, expected {w.label}")
        if table.n_max >= n:
            return table
        if not build:
            raise CapacityError(f"cached HTable at {path} stops at n_max={table.n_max} < {n}; pass --build")
        logger.info("cache miss: extending %s from n_max=%d to %d", w.label, table.n_max, n)
    table = build_h_table(w, n)
    if persist:
        save_htable(table, path)
    return table
