# cycleweights/exact_oracle.py
"""Exact ground truth at small n: partitions, the h_n recurrence and series moments."""
from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np
from scipy.special import logsumexp

from cycleweights import scaled
from cycleweights.config import settings
from cycleweights.errors import CapacityError, DomainError
from cycleweights.models import CycleType, HTable
from cycleweights.scaled import ScaledReal
from cycleweights.weights import WeightSequence, theta_eval

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Statistic:
    """Наблюдаемая величина для exact_statistic_pmf"""

    kind: str
    x: float = 0.0

    KINDS = ("L1", "tail_count", "total_cycles")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise DomainError(f"unknown statistic {self.kind!r}")

    @classmethod
    def longest(cls) -> "Statistic":
        return cls("L1")

    @classmethod
    def tail_count(cls, x: float) -> "Statistic":
        return cls("tail_count", float(x))

    @classmethod
    def total_cycles(cls) -> "Statistic":
        return cls("total_cycles")

    def __call__(self, ct: CycleType) -> int:
        if self.kind == "L1":
            return ct.pairs[-1][0]
        if self.kind == "tail_count":
            return ct.tail_count(self.x)
        return ct.total_cycles


@dataclass(frozen=True)
class BoundCheck:
    lhs: float
    rhs: float
    holds: bool
    x_lo: float = 0.0
    x_hi: float = 0.0


def _check_enumeration_cap(n: int, cap: Optional[int]) -> int:
    cap = settings.ENUMERATION_CAP if cap is None else cap
    if n < 1:
        raise DomainError(f"enumeration needs n >= 1, got {n}")
    if n > cap:
        raise CapacityError(f"n={n} exceeds the enumeration cap {cap}")
    return cap


def _check_series_cap(n: int) -> None:
    if n < 0:
        raise DomainError(f"series degree must be nonnegative, got {n}")
    if n > settings.SERIES_CAP:
        raise CapacityError(f"n={n} exceeds the series cap {settings.SERIES_CAP}")


def partitions(n: int, largest: Optional[int] = None) -> Iterator[List[int]]:
    """Разбиения n по убыванию наибольшей части (лексикографически)"""
    if largest is None:
        largest = n
    if n == 0:
        yield []
        return
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            yield [first] + rest


def _log_partition_weights(w: WeightSequence, n: int) -> Tuple[List[CycleType], np.ndarray]:
    log_theta = [0.0] + [theta_eval(w, m)[1] for m in range(1, n + 1)]
    types, logs = [], []
    for parts in partitions(n):
        ct = CycleType.from_lengths(parts)
        lw = 0.0
        for m, c in ct.pairs:
            # θ_m^{C_m} / (m^{C_m} C_m!)
            lw += c * (log_theta[m] - math.log(m)) - math.lgamma(c + 1)
        types.append(ct)
        logs.append(lw)
    return types, np.asarray(logs)


def enumerate_cycle_types(w: WeightSequence, n: int, cap: Optional[int] = None) -> List[Tuple[CycleType, float]]:
    """All cycle types of S_n with their P_Θ probabilities."""
    _check_enumeration_cap(n, cap)
    types, logs = _log_partition_weights(w, n)
    log_h = logsumexp(logs)
    if log_h == -math.inf:
        raise DomainError(f"all permutations of {n} have zero weight under {w.label}")
    probs = np.exp(logs - log_h)
    logger.debug("enumerated %d cycle types for n=%d (%s)", len(types), n, w.label)
    return list(zip(types, probs.tolist()))


def h_exact(w: WeightSequence, n: int, cap: Optional[int] = None) -> ScaledReal:
    """h_n как сумма по разбиениям"""
    if n == 0:
        return ScaledReal(1.0, 0)
    _check_enumeration_cap(n, cap)
    _, logs = _log_partition_weights(w, n)
    return ScaledReal.from_log(float(logsumexp(logs)))


def build_h_table(w: WeightSequence, n_max: int) -> HTable:
    """h_0..h_{n_max} from n·h_n = Σ_{k=1}^{n} θ_k h_{n−k}."""
    if n_max < 0:
        raise DomainError(f"n_max must be nonnegative, got {n_max}")
    logger.info("building HTable for %s up to n_max=%d", w.label, n_max)
    theta = scaled.from_log_array(np.concatenate([[-np.inf], w.log_theta_array(n_max)]))
    mant, exp = scaled.exp_series(theta, n_max)
    return HTable(weight=w, n_max=n_max, mantissa=mant, exponent=exp)


def exact_statistic_pmf(w: WeightSequence, n: int, statistic: Statistic, cap: Optional[int] = None) -> Dict[int, float]:
    pmf: Dict[int, float] = defaultdict(float)
    for ct, p in enumerate_cycle_types(w, n, cap):
        pmf[statistic(ct)] += p
    return dict(sorted(pmf.items()))


def _tail_multiplied_theta(w: WeightSequence, n: int, x: float, factor: float) -> scaled.ScaledArray:
    """k·g_k для exp((e^s−1)Σ_{k≥x}(θ_k/k)t^k + g_Θ(t)), k = 1..n"""
    logs = np.concatenate([[-np.inf], w.log_theta_array(n)])
    ks = np.arange(n + 1)
    logs[(ks >= x) & (ks >= 1)] += math.log(factor)
    return scaled.from_log_array(logs)


def mgf_series(w: WeightSequence, n: int, x: float, s: float, h: Optional[HTable] = None) -> float:
    """E_Θ[exp(s·Σ_{k≥x} C_k)] through [t^n] of a truncated exponential series.

    On k ≥ x the combined coefficient is e^s·θ_k/k, so every series
    coefficient stays nonnegative for any real s.
    """
    _check_series_cap(n)
    if x < 0:
        raise DomainError(f"x must be nonnegative, got {x!r}")
    if s == 0.0 or x > n:
        return 1.0
    numer = scaled.exp_series(_tail_multiplied_theta(w, n, x, math.exp(s)), n)
    h_n = h[n] if h is not None and h.n_max >= n else build_h_table(w, n)[n]
    return scaled.entry(numer, n).ratio(h_n)


def corollary_bound_check(w: WeightSequence, n: int, u: float, v: float) -> BoundCheck:
    """[t^n] f_n e^{g_Θ} ≤ 2 f_n(r_n) h_n with f_n = F²(1+F)².

    F = Σ_{x_{n,v} ≤ k < x_{n,u}} (θ_k/k) t^k. Advisory below the unknown n₀:
    violations are logged, never raised.
    """
    from cycleweights.asymptotics import solve_saddle, threshold

    if not (0.0 <= u < v):
        raise DomainError(f"need 0 <= u < v, got u={u!r}, v={v!r}")
    _check_series_cap(n)
    sd = solve_saddle(w, n)
    x_hi = threshold(sd, u)
    x_lo = threshold(sd, v)
    k_lo = max(int(math.ceil(x_lo)), 1)
    ks = np.arange(k_lo, int(math.ceil(x_hi)))
    ks = ks[ks < x_hi]

    if ks.size == 0:
        return BoundCheck(0.0, 0.0, True, x_lo, x_hi)

    log_coef = w.log_theta_range(int(ks[0]), int(ks[-1])) - np.log(ks)
    F_r = float(np.sum(np.exp(log_coef + ks * math.log(sd.r_n))))
    f_r = F_r ** 2 * (1.0 + F_r) ** 2

    # F as a polynomial truncated at degree n
    F_logs = np.full(n + 1, -np.inf)
    inside = ks <= n
    F_logs[ks[inside]] = log_coef[inside]
    F = scaled.from_log_array(F_logs)
    one_plus_F = scaled.from_log_array(F_logs)
    scaled.store(one_plus_F, 0, ScaledReal(1.0, 0))
    F2 = scaled.series_product(F, F, n)
    G2 = scaled.series_product(one_plus_F, one_plus_F, n)
    f_series = scaled.series_product(F2, G2, n)

    table = build_h_table(w, n)
    lhs = scaled.coefficient_pairing(f_series, (table.mantissa, table.exponent), n)
    rhs = table[n].scale(2.0 * f_r)
    holds = lhs.is_zero or (not rhs.is_zero and lhs.ratio(rhs) <= 1.0)
    if not holds:
        logger.warning("corollary bound violated at n=%d (u=%g, v=%g): lhs=%.6g rhs=%.6g", n, u, v, lhs.to_float(), rhs.to_float())
    return BoundCheck(lhs.to_float(), rhs.to_float(), holds, x_lo, x_hi)
