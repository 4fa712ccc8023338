# cycleweights/weights.py
"""Weight sequences Θ = (θ_k) and their generating function g_Θ."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import NamedTuple, Tuple

import numpy as np

from cycleweights.config import settings
from cycleweights.errors import DomainError
from cycleweights.special import power_tail_bound

logger = logging.getLogger(__name__)

# beyond this index θ_k is evaluated through its logarithm
LOG_SPACE_THRESHOLD = 10 ** 6


class Family(str, Enum):
    POLYNOMIAL = "polynomial"
    EWENS = "ewens"
    TABLE = "table"


FAMILY_TAGS = {Family.POLYNOMIAL: 1, Family.EWENS: 2, Family.TABLE: 3}


class TruncatedSum(NamedTuple):
    value: float
    truncation_K: int
    tail_bound: float


@dataclass(frozen=True)
class WeightSequence:
    family: Family
    parameter: float = 0.0
    values: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.family in (Family.POLYNOMIAL, Family.EWENS):
            if not (self.parameter > 0 and math.isfinite(self.parameter)):
                raise DomainError(f"{self.family.value} weights need a positive parameter, got {self.parameter!r}")
        elif self.family == Family.TABLE:
            if not self.values:
                raise DomainError("table weights need at least one value")
            if any(not (v >= 0 and math.isfinite(v)) for v in self.values):
                raise DomainError("table weights must be finite and nonnegative")
        else:
            raise DomainError(f"unknown weight family {self.family!r}")

    @classmethod
    def polynomial(cls, alpha: float) -> "WeightSequence":
        return cls(Family.POLYNOMIAL, float(alpha))

    @classmethod
    def ewens(cls, vartheta: float) -> "WeightSequence":
        return cls(Family.EWENS, float(vartheta))

    @classmethod
    def table(cls, values) -> "WeightSequence":
        return cls(Family.TABLE, 0.0, tuple(float(v) for v in values))

    @property
    def label(self) -> str:
        if self.family == Family.POLYNOMIAL:
            return f"polynomial(alpha={self.parameter:g})"
        if self.family == Family.EWENS:
            return f"ewens(vartheta={self.parameter:g})"
        return f"table(K0={len(self.values)})"

    @cached_property
    def alpha_fit(self) -> float:
        """Показатель экстраполяции таблицы по двум последним значениям"""
        if self.family != Family.TABLE or len(self.values) < 2:
            return 0.0
        k0 = len(self.values)
        last, prev = self.values[-1], self.values[-2]
        if last <= 0 or prev <= 0:
            return 0.0
        return math.log(last / prev) / math.log(k0 / (k0 - 1))

    @property
    def growth_exponent(self) -> float:
        """γ with θ_k = c·k^γ in the tail"""
        if self.family == Family.POLYNOMIAL:
            return self.parameter
        if self.family == Family.EWENS:
            return 0.0
        return self.alpha_fit

    @property
    def tail_coefficient(self) -> float:
        if self.family == Family.POLYNOMIAL:
            return 1.0
        if self.family == Family.EWENS:
            return self.parameter
        k0 = len(self.values)
        return self.values[-1] / k0 ** self.alpha_fit

    @property
    def explicit_length(self) -> int:
        return len(self.values) if self.family == Family.TABLE else 0

    def log_theta_range(self, lo: int, hi: int) -> np.ndarray:
        """ln θ_k для k = lo..hi (включительно)"""
        if lo < 1:
            raise DomainError(f"weights are indexed from k=1, got {lo}")
        if hi < lo:
            return np.empty(0)
        ks = np.arange(lo, hi + 1, dtype=np.float64)
        if self.family == Family.POLYNOMIAL:
            return self.parameter * np.log(ks)
        if self.family == Family.EWENS:
            return np.full(ks.shape, math.log(self.parameter))
        k0 = len(self.values)
        out = np.empty(ks.shape)
        explicit = ks <= k0
        with np.errstate(divide="ignore"):
            table_logs = np.log(np.asarray(self.values, dtype=np.float64))
            out[explicit] = table_logs[ks[explicit].astype(np.int64) - 1]
            out[~explicit] = table_logs[-1] + self.alpha_fit * (np.log(ks[~explicit]) - math.log(k0))
        return out

    def log_theta_array(self, K: int) -> np.ndarray:
        return self.log_theta_range(1, K)

    def theta_array(self, K: int) -> np.ndarray:
        if self.family == Family.POLYNOMIAL and K <= LOG_SPACE_THRESHOLD:
            return np.arange(1, K + 1, dtype=np.float64) ** self.parameter
        with np.errstate(over="ignore"):
            return np.exp(self.log_theta_array(K))


def theta_eval(w: WeightSequence, k: int) -> Tuple[float, float]:
    """(θ_k, ln θ_k); ln θ_k = −inf ровно когда θ_k = 0"""
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise DomainError(f"theta is defined for integers k >= 1, got {k!r}")
    k = int(k)
    if w.family == Family.POLYNOMIAL:
        log_value = w.parameter * math.log(k)
        if k > LOG_SPACE_THRESHOLD:
            try:
                return math.exp(log_value), log_value
            except OverflowError:
                return math.inf, log_value
        return float(k) ** w.parameter, log_value
    if w.family == Family.EWENS:
        return w.parameter, math.log(w.parameter)
    log_value = float(w.log_theta_range(k, k)[0])
    return (math.exp(log_value) if log_value > -math.inf else 0.0), log_value


def g_theta_partial(w: WeightSequence, t: float, eps: float) -> TruncatedSum:
    """Σ_{k≤K} (θ_k/k) t^k with a certified geometric tail bound ≤ eps.

    Term ratios beyond K are at most ρ_K = t·((K+1)/K)^{max(γ−1, 0)}, so the
    remainder is bounded by term_K·ρ_K/(1−ρ_K). K is the first index where
    that bound drops to eps (table weights certify only past their last entry).
    """
    if not (0.0 <= t < 1.0):
        raise DomainError(f"g_theta needs 0 <= t < 1, got t={t!r}")
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps!r}")
    if t == 0.0:
        return TruncatedSum(0.0, 0, 0.0)

    log_t = math.log(t)
    excess = max(w.growth_exponent - 1.0, 0.0)
    first_certifiable = max(1, w.explicit_length)
    partial = []
    lo, chunk = 1, 4096
    while True:
        hi = lo + chunk - 1
        ks = np.arange(lo, hi + 1, dtype=np.float64)
        with np.errstate(over="ignore"):
            terms = np.exp(w.log_theta_range(lo, hi) - np.log(ks) + ks * log_t)
        rho = t * ((ks + 1.0) / ks) ** excess
        with np.errstate(divide="ignore", invalid="ignore"):
            bounds = np.where(rho < 1.0, terms * rho / (1.0 - rho), np.inf)
        bounds[ks < first_certifiable] = np.inf
        hits = np.nonzero(bounds <= eps)[0]
        if hits.size:
            stop = int(hits[0])
            partial.append(terms[: stop + 1])
            K = lo + stop
            value = math.fsum(np.concatenate(partial))
            return TruncatedSum(value, K, float(bounds[stop]))
        partial.append(terms)
        lo = hi + 1
        chunk *= 2


def weighted_power_sum(
    w: WeightSequence,
    v: float,
    power: float,
    start: int = 1,
    rel_tol: float = None,
) -> TruncatedSum:
    """Σ_{k≥start} θ_k k^power e^{−kv}, cut where (K−start)·v reaches TRUNCATION_KV.

    The remainder past K is bounded by integral comparison; with rel_tol the
    window is widened until the bound is below rel_tol·value.
    """
    if not v > 0:
        raise DomainError(f"power sums need v > 0, got {v!r}")
    start = max(int(start), 1)
    delta = w.growth_exponent + power
    span = int(math.ceil(settings.TRUNCATION_KV / v))
    K = max(start - 1 + span, start, w.explicit_length + 1)
    if delta > 0:
        K = max(K, int(math.ceil(delta / v)))
    while True:
        ks = np.arange(start, K + 1, dtype=np.float64)
        with np.errstate(over="ignore"):
            value = float(np.sum(np.exp(w.log_theta_range(start, K) + power * np.log(ks) - ks * v)))
        tail = w.tail_coefficient * power_tail_bound(delta, v, K)
        if rel_tol is None or value == 0.0 or tail <= rel_tol * value:
            return TruncatedSum(value, K, tail)
        logger.debug("widening power sum window past K=%d (tail %.3g vs %.3g)", K, tail, value)
        K += span
