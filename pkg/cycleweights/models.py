# cycleweights/models.py
"""Domain types shared by the oracle, sampler, asymptotics and stats modules."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, Mapping, Optional, Tuple

import numpy as np

from cycleweights import scaled
from cycleweights.errors import CapacityError, DomainError
from cycleweights.scaled import ScaledReal
from cycleweights.weights import WeightSequence


@dataclass(frozen=True)
class CycleType:
    """Cycle counts C_m of a permutation of n, with Σ m·C_m = n."""

    pairs: Tuple[Tuple[int, int], ...]
    n: int

    def __post_init__(self):
        total = 0
        last = 0
        for m, c in self.pairs:
            if m <= last or c < 1:
                raise DomainError(f"cycle counts must be sorted by length with C_m >= 1: {self.pairs}")
            last = m
            total += m * c
        if total != self.n:
            raise DomainError(f"Σ m·C_m = {total} does not match n = {self.n}")

    @classmethod
    def from_counts(cls, counts: Mapping[int, int]) -> "CycleType":
        pairs = tuple(sorted((int(m), int(c)) for m, c in counts.items() if c))
        return cls(pairs, sum(m * c for m, c in pairs))

    @classmethod
    def from_lengths(cls, lengths: Iterable[int]) -> "CycleType":
        return cls.from_counts(Counter(int(x) for x in lengths))

    @property
    def counts(self) -> Dict[int, int]:
        return dict(self.pairs)

    @property
    def total_cycles(self) -> int:
        return sum(c for _, c in self.pairs)

    def lengths_desc(self) -> Tuple[int, ...]:
        out = []
        for m, c in reversed(self.pairs):
            out.extend([m] * c)
        return tuple(out)

    def tail_count(self, x: float) -> int:
        """Σ_{k≥x} C_k"""
        return sum(c for m, c in self.pairs if m >= x)

    def key(self) -> str:
        return "+".join(f"{m}^{c}" if c > 1 else str(m) for m, c in reversed(self.pairs))


@dataclass(frozen=True)
class ProcessSample:
    """Длины циклов по убыванию (с кратностями)"""

    cycle_lengths_desc: Tuple[int, ...]
    n: int

    def __post_init__(self):
        lengths = self.cycle_lengths_desc
        if sum(lengths) != self.n:
            raise DomainError("cycle lengths do not sum to n")
        if any(a < b for a, b in zip(lengths, lengths[1:])) or (lengths and lengths[-1] < 1):
            raise DomainError("cycle lengths must be positive and sorted in decreasing order")

    @classmethod
    def from_cycle_type(cls, ct: CycleType) -> "ProcessSample":
        return cls(ct.lengths_desc(), ct.n)


@dataclass(frozen=True, eq=False)
class HTable:
    """h_0..h_{n_max} as scaled reals; h_0 = 1."""

    weight: WeightSequence
    n_max: int
    mantissa: np.ndarray
    exponent: np.ndarray

    def __post_init__(self):
        if self.mantissa.shape != (self.n_max + 1,) or self.exponent.shape != (self.n_max + 1,):
            raise DomainError("HTable arrays must have n_max + 1 entries")
        if self.mantissa[0] != 1.0 or self.exponent[0] != 0:
            raise DomainError("HTable must start with h_0 = 1")
        self.mantissa.setflags(write=False)
        self.exponent.setflags(write=False)

    def __getitem__(self, n: int) -> ScaledReal:
        self.check_index(n)
        return scaled.entry((self.mantissa, self.exponent), n)

    def check_index(self, n: int) -> None:
        if n < 0:
            raise DomainError(f"h_n is defined for n >= 0, got {n}")
        if n > self.n_max:
            raise CapacityError(f"n={n} exceeds the table size n_max={self.n_max}")

    @cached_property
    def log_h(self) -> np.ndarray:
        arr = scaled.to_log_array((self.mantissa, self.exponent))
        arr.setflags(write=False)
        return arr

    @cached_property
    def scaled_theta(self) -> scaled.ScaledArray:
        return scaled.from_log_array(np.concatenate([[-np.inf], self.weight.log_theta_array(self.n_max)]))

    def relative_residual(self, n: int) -> float:
        """|n·h_n − Σ θ_k h_{n−k}| / (n·h_n)"""
        if n < 1:
            raise DomainError("the recurrence residual is defined for n >= 1")
        self.check_index(n)
        t_mant, t_exp = self.scaled_theta
        rhs = scaled.scaled_dot(t_mant[1:n + 1], t_exp[1:n + 1], self.mantissa[n - 1::-1], self.exponent[n - 1::-1])
        lhs = self[n].scale(float(n))
        if lhs.is_zero:
            return 0.0 if rhs.is_zero else math.inf
        return abs(1.0 - rhs.ratio(lhs))


@dataclass(frozen=True)
class SaddleData:
    """Solved saddle quantities for Σ θ_k e^{−kv} = n."""

    weights: WeightSequence
    n: int
    v_n: float
    n_star: float
    ell_n: float
    r_n: float
    a_n: float
    b_n: float
    g_r: float
    truncation_K: int
    residual: float
    tail_bound: float
    iterations: int = 0
    trace: Tuple[float, ...] = field(default=(), repr=False)

    @property
    def alpha(self) -> float:
        return self.weights.growth_exponent

    def summary(self) -> Dict[str, Optional[float]]:
        return {
            "n": self.n,
            "v_n": self.v_n,
            "n_star": self.n_star,
            "ell_n": self.ell_n if math.isfinite(self.ell_n) else None,
            "r_n": self.r_n,
            "a_n": self.a_n,
            "b_n": self.b_n,
            "g_r": self.g_r,
            "truncation_K": self.truncation_K,
            "residual": self.residual,
            "tail_bound": self.tail_bound,
            "iterations": self.iterations,
        }
