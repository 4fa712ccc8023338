# cycleweights/sampler.py
"""Exact cycle-type sampling from P_Θ driven by an HTable.

At remaining size m the next cycle has length k with probability
θ_k·h_{m−k} / (m·h_m); the recurrence for h makes these sum to one.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import partial
from multiprocessing import Pool
from typing import Iterable, Iterator, List, Optional, TextIO, Tuple, Union

import numpy as np
from pydantic import ValidationError

from cycleweights.config import settings
from cycleweights.errors import CapacityError, DomainError, NumericError
from cycleweights.models import CycleType, HTable
from cycleweights.schemas import SampleRecord, SamplerConfig
from cycleweights.weights import WeightSequence

logger = logging.getLogger(__name__)

GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MASK64 = (1 << 64) - 1
# below this remaining size the CDF scan runs in plain Python
SMALL_SCAN = 64


def substream_key(seed: int, index: int) -> int:
    """64-битное смешивание (seed, index): splitmix64 поверх seed ^ φ·index"""
    z = (seed ^ ((index * GOLDEN_GAMMA) & MASK64)) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def substream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=substream_key(seed, index)))


@dataclass
class SamplerCounters:
    samples: int = 0
    steps: int = 0
    scanned: int = 0  # logical scan length: k's up to the accepted one
    evaluated: int = 0  # probabilities actually computed
    incidents: int = 0

    def merge(self, other: "SamplerCounters") -> None:
        self.samples += other.samples
        self.steps += other.steps
        self.scanned += other.scanned
        self.evaluated += other.evaluated
        self.incidents += other.incidents

    @property
    def mean_scan(self) -> float:
        return self.scanned / self.samples if self.samples else 0.0


class CycleTypeSampler:
    """Inverse-CDF scan over first-cycle lengths, reading log h once."""

    def __init__(self, w: WeightSequence, log_h: np.ndarray, debug: Optional[bool] = None):
        self.weight = w
        self.n_max = log_h.shape[0] - 1
        self.log_h = log_h
        self.log_theta = np.concatenate([[-np.inf], w.log_theta_array(self.n_max)])
        self.log_m = np.log(np.arange(self.n_max + 1, dtype=np.float64).clip(min=1.0))
        self._log_theta_list = self.log_theta[: SMALL_SCAN + 1].tolist()
        self._log_h_list = self.log_h[: SMALL_SCAN + 1].tolist()
        self.debug = settings.SAMPLER_DEBUG if debug is None else debug
        self.counters = SamplerCounters()

    @classmethod
    def for_table(cls, w: WeightSequence, h: HTable, debug: Optional[bool] = None) -> "CycleTypeSampler":
        if h.weight != w:
            raise DomainError(f"HTable was built for {h.weight.label}, not {w.label}")
        return cls(w, np.asarray(h.log_h), debug)

    def _scan_small(self, m: int, u: float) -> Tuple[int, int]:
        lt, lh = self._log_theta_list, self._log_h_list
        base = math.log(m) + lh[m]
        acc, comp = 0.0, 0.0
        for k in range(1, m + 1):
            p = math.exp(lt[k] + lh[m - k] - base)
            # Neumaier summation
            t = acc + p
            if abs(acc) >= abs(p):
                comp += (acc - t) + p
            else:
                comp += (p - t) + acc
            acc = t
            if acc + comp >= u:
                return k, k
        return -1, m

    def _scan_chunked(self, m: int, u: float) -> Tuple[int, int]:
        base = self.log_m[m] + self.log_h[m]
        acc, comp = 0.0, 0.0
        lo = 1
        chunk = settings.SAMPLER_CHUNK
        evaluated = 0
        while lo <= m:
            hi = min(m, lo + chunk - 1)
            ks = np.arange(lo, hi + 1)
            p = np.exp(self.log_theta[ks] + self.log_h[m - ks] - base)
            cdf = np.cumsum(p) + (acc + comp)
            evaluated += ks.size
            hit = int(np.searchsorted(cdf, u, side="left"))
            if hit < ks.size:
                return lo + hit, evaluated
            block = math.fsum(p)
            t = acc + block
            if abs(acc) >= abs(block):
                comp += (acc - t) + block
            else:
                comp += (block - t) + acc
            acc = t
            lo = hi + 1
            chunk *= 2
        return -1, evaluated

    def _check_normalization(self, m: int) -> None:
        ks = np.arange(1, m + 1)
        total = math.fsum(np.exp(self.log_theta[ks] + self.log_h[m - ks] - self.log_m[m] - self.log_h[m]))
        if abs(total - 1.0) > 1e-9:
            raise NumericError(f"first-cycle law at m={m} sums to {total!r}")

    def draw(self, n: int, rng: np.random.Generator, counters: Optional[SamplerCounters] = None) -> CycleType:
        if n < 1:
            raise DomainError(f"sample size n must be >= 1, got {n}")
        if n > self.n_max:
            raise CapacityError(f"n={n} exceeds the HTable n_max={self.n_max}")
        counters = self.counters if counters is None else counters
        lengths: List[int] = []
        m = n
        while m > 0:
            if self.debug:
                self._check_normalization(m)
            u = rng.random()
            if m <= SMALL_SCAN:
                k, evaluated = self._scan_small(m, u)
            else:
                k, evaluated = self._scan_chunked(m, u)
            if k < 0:
                counters.incidents += 1
                logger.warning("CDF scan exhausted at m=%d with u=%.17g; assigning k=m", m, u)
                k = m
            counters.steps += 1
            counters.scanned += k
            counters.evaluated += evaluated
            lengths.append(k)
            m -= k
        counters.samples += 1
        return CycleType.from_lengths(lengths)


def sample_cycle_type(w: WeightSequence, h: HTable, n: int, rng: np.random.Generator) -> CycleType:
    """Один тип циклов σ ~ P_Θ"""
    if n > h.n_max:
        raise CapacityError(f"n={n} exceeds the HTable n_max={h.n_max}")
    return CycleTypeSampler.for_table(w, h).draw(n, rng)


# -- parallel batch driver ---------------------------------------------------

# one per pool process, set by _init_worker
_WORKER_SAMPLER: Optional[CycleTypeSampler] = None


def _init_worker(w: WeightSequence, log_h: np.ndarray) -> None:
    global _WORKER_SAMPLER
    _WORKER_SAMPLER = CycleTypeSampler(w, log_h)


def _draw_block(sampler: CycleTypeSampler, args: Tuple[int, int, int, int]) -> Tuple[List[CycleType], SamplerCounters]:
    n, seed, lo, hi = args
    counters = SamplerCounters()
    out = [sampler.draw(n, substream(seed, i), counters) for i in range(lo, hi)]
    return out, counters


def _draw_range(args: Tuple[int, int, int, int]) -> Tuple[List[CycleType], SamplerCounters]:
    return _draw_block(_WORKER_SAMPLER, args)


def _validate(cfg: Union[SamplerConfig, dict], h: HTable) -> SamplerConfig:
    if isinstance(cfg, dict):
        try:
            cfg = SamplerConfig(**cfg)
        except ValidationError as e:
            raise DomainError(f"invalid sampler config: {e}")
    if cfg.n > h.n_max:
        raise CapacityError(f"n={cfg.n} exceeds the HTable n_max={h.n_max}")
    return cfg


def _stream(w: WeightSequence, log_h: np.ndarray, cfg: SamplerConfig, counters: SamplerCounters) -> Iterator[CycleType]:
    block = max(1, min(256, cfg.num_samples // (4 * cfg.workers)))
    ranges = [(cfg.n, cfg.seed, lo, min(lo + block, cfg.num_samples)) for lo in range(0, cfg.num_samples, block)]
    every = settings.PROGRESS_EVERY
    done = 0

    def _emit(results: Iterable[Tuple[List[CycleType], SamplerCounters]]) -> Iterator[CycleType]:
        nonlocal done
        for cycle_types, part in results:
            counters.merge(part)
            for ct in cycle_types:
                yield ct
                done += 1
                if every and done % every == 0:
                    logger.info("sampled %d/%d cycle types (n=%d)", done, cfg.num_samples, cfg.n)

    if cfg.workers == 1:
        sampler = CycleTypeSampler(w, log_h)
        yield from _emit(map(partial(_draw_block, sampler), ranges))
        return
    with Pool(processes=cfg.workers, initializer=_init_worker, initargs=(w, log_h)) as pool:
        yield from _emit(pool.imap(_draw_range, ranges))


def sample_batch(
    w: WeightSequence,
    h: HTable,
    cfg: Union[SamplerConfig, dict],
    counters: Optional[SamplerCounters] = None,
) -> Iterator[CycleType]:
    """Samples 0..N−1 in index order; sample i uses the substream of (seed, i).

    Validation happens eagerly; the returned stream does not depend on the
    worker count.
    """
    cfg = _validate(cfg, h)
    if h.weight != w:
        raise DomainError(f"HTable was built for {h.weight.label}, not {w.label}")
    counters = SamplerCounters() if counters is None else counters
    return _stream(w, np.asarray(h.log_h), cfg, counters)


def write_samples(samples: Iterable[CycleType], stream: TextIO) -> int:
    """JSON lines: {"i": index, "cycles": [[m, C_m], ...]}"""
    count = 0
    for i, ct in enumerate(samples):
        stream.write(SampleRecord(i=i, cycles=list(ct.pairs)).model_dump_json() + "\n")
        count += 1
    return count
