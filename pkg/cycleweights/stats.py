# cycleweights/stats.py
"""Observables of sampled cycle types and the Monte Carlo checks of the limit theorems."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats as sp_stats
from scipy.special import digamma

from cycleweights.asymptotics import ell_n, expected_tail_count, tail_mass_beyond, threshold
from cycleweights.config import settings
from cycleweights.errors import DomainError
from cycleweights.models import CycleType, ProcessSample, SaddleData
from cycleweights.schemas import Check, Tolerances, VerificationReport

logger = logging.getLogger(__name__)

Sample = Union[CycleType, ProcessSample]


class LongestCycles(NamedTuple):
    values: Tuple[int, ...]
    truncated: bool


def gumbel_cdf(x):
    """F(x) = exp(−exp(−x))"""
    return np.exp(-np.exp(-np.asarray(x, dtype=np.float64)))


def ks_distance(sample: Sequence[float], cdf: Callable) -> float:
    """sup |F_emp − F| по точкам выборки"""
    return float(sp_stats.kstest(np.asarray(sample, dtype=np.float64), cdf).statistic)


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> float:
    return float(sp_stats.ks_2samp(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)).statistic)


def tv_distance(p: Mapping[int, float], q: Mapping[int, float]) -> float:
    """½ Σ |p_i − q_i|"""
    keys = set(p) | set(q)
    return 0.5 * math.fsum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def poisson_tv(values: np.ndarray, mean: float) -> float:
    """TV between the empirical law of integer values and Poisson(mean)"""
    values = np.asarray(values, dtype=np.int64)
    if mean == 0.0:
        return float(np.mean(values != 0))
    top = int(max(values.max(initial=0), sp_stats.poisson.ppf(1.0 - 1e-12, mean)))
    support = np.arange(top + 1)
    empirical = np.bincount(values, minlength=top + 1)[: top + 1] / values.size
    target = sp_stats.poisson.pmf(support, mean)
    outside = max(0.0, 1.0 - float(target.sum()))
    return 0.5 * (float(np.abs(empirical - target).sum()) + outside)


def _ascending_lengths(batch: Sequence[Sample]) -> Tuple[List[np.ndarray], int]:
    if not batch:
        raise DomainError("verification needs a nonempty batch")
    out = []
    sizes = set()
    for item in batch:
        if isinstance(item, CycleType):
            lengths = item.lengths_desc()
        else:
            lengths = item.cycle_lengths_desc
        sizes.add(item.n)
        out.append(np.asarray(lengths[::-1], dtype=np.float64))
    if len(sizes) != 1:
        raise DomainError(f"batch mixes permutation sizes {sorted(sizes)}")
    return out, sizes.pop()


def _counts_at_least(ascending: np.ndarray, xs: np.ndarray) -> np.ndarray:
    return ascending.size - np.searchsorted(ascending, xs, side="left")


def longest_cycles(ct: Sample, K: int) -> LongestCycles:
    """L_j = max{m : Σ_{k≥m} C_k ≥ j}, j = 1..K; missing entries are 0."""
    if K < 1:
        raise DomainError(f"K must be >= 1, got {K}")
    if isinstance(ct, ProcessSample):
        ct = CycleType.from_lengths(ct.cycle_lengths_desc)
    out: List[int] = []
    at_least = 0
    for m, c in reversed(ct.pairs):
        at_least += c
        while len(out) < min(at_least, K):
            out.append(m)
        if len(out) == K:
            break
    truncated = len(out) < K
    out.extend([0] * (K - len(out)))
    return LongestCycles(tuple(out), truncated)


@dataclass(frozen=True)
class ProcessPath:
    """Ступенчатая функция y ↦ P_y по моментам скачков"""

    jump_times: np.ndarray
    lengths_desc: np.ndarray
    n_star: float
    ell_n: float

    def __call__(self, y: float) -> int:
        if y < 0:
            raise DomainError(f"P_y is defined for y >= 0, got {y!r}")
        return int(np.searchsorted(self.jump_times, y, side="right"))

    def threshold(self, y: float) -> float:
        shift = self.ell_n if y == 0 else min(-math.log(y), self.ell_n)
        return self.n_star * (self.ell_n + shift)

    def count_at(self, y: float) -> int:
        """Прямой пересчёт #{циклов длины ≥ x_n(y)}"""
        return int(np.count_nonzero(self.lengths_desc >= self.threshold(y)))


def jump_times(lengths_desc: np.ndarray, n_star: float, ell: float) -> np.ndarray:
    """y_j = exp(ℓ_n − L_j/n*), clamped to 0 at or above the cap 2n*ℓ_n"""
    lengths_desc = np.asarray(lengths_desc, dtype=np.float64)
    cap = 2.0 * n_star * ell
    return np.where(lengths_desc >= cap, 0.0, np.exp(ell - lengths_desc / n_star))


def process_path(ct: Sample, sd: SaddleData, alpha: float) -> ProcessPath:
    if ct.n != sd.n:
        raise DomainError(f"cycle type has n={ct.n} but saddle data is for n={sd.n}")
    ell = ell_n(sd, alpha)
    lengths = ct.lengths_desc() if isinstance(ct, CycleType) else ct.cycle_lengths_desc
    lengths = np.asarray(lengths, dtype=np.float64)
    jumps = jump_times(lengths, sd.n_star, ell)
    return ProcessPath(jumps, lengths, sd.n_star, ell)


def _seal(experiment: str, config: dict, checks: List[Check], distances: dict, counts: dict) -> VerificationReport:
    report = VerificationReport(experiment=experiment, config=config, checks=checks, distances=distances, counts=counts)
    for c in report.checks:
        logger.info("[%s] %s observed=%.6g target=%.6g tol=%.3g -> %s", experiment, c.name, c.observed, c.target, c.tol, "pass" if c.passed else "FAIL")
    return report


def _saddle_echo(sd: SaddleData) -> dict:
    return {"n": sd.n, "weights": sd.weights.label, "n_star": sd.n_star, "ell_n": sd.ell_n, "v_n": sd.v_n}


def verify_poisson_increments(
    batch: Sequence[Sample],
    sd: SaddleData,
    y_grid: Sequence[float],
    tolerances: Optional[Tolerances] = None,
) -> VerificationReport:
    """Increments P_{y_j} − P_{y_{j−1}} (y_0 = 0) against independent Poisson(y_j − y_{j−1})."""
    tol = tolerances or Tolerances()
    grid = np.asarray(y_grid, dtype=np.float64)
    if grid.size == 0 or np.any(grid <= 0) or np.any(np.diff(grid) < 0):
        raise DomainError("y grid must be positive and nondecreasing")
    samples, n = _ascending_lengths(batch)
    if n != sd.n:
        raise DomainError(f"batch has n={n} but saddle data is for n={sd.n}")

    ys = np.concatenate([[0.0], grid])
    xs = np.array([threshold(sd, y) for y in ys])
    P = np.stack([_counts_at_least(a, xs) for a in samples])
    D = np.diff(P, axis=1)
    targets = np.diff(ys)

    checks: List[Check] = []
    distances: Dict[str, float] = {}
    for j, target in enumerate(targets, start=1):
        inc = D[:, j - 1]
        mean = float(inc.mean())
        checks.append(Check(name=f"increment_{j}_mean", observed=mean, target=float(target), tol=tol.mean_rel * float(target)))
        if target > 0:
            var = float(inc.var(ddof=1)) if inc.size > 1 else 0.0
            ratio = var / mean if mean > 0 else 0.0
            checks.append(Check(name=f"increment_{j}_dispersion", observed=ratio, target=1.0, tol=tol.dispersion))
        tv = poisson_tv(inc, float(target))
        distances[f"tv_increment_{j}"] = tv
        checks.append(Check(name=f"increment_{j}_tv", observed=tv, target=0.0, tol=tol.tv))

    for a, b in combinations(range(D.shape[1]), 2):
        da, db = D[:, a], D[:, b]
        if da.std() == 0 or db.std() == 0:
            corr = 0.0
        else:
            corr = float(np.corrcoef(da, db)[0, 1])
        checks.append(Check(name=f"corr_{a + 1}_{b + 1}", observed=corr, target=0.0, tol=tol.corr))

    config = {**_saddle_echo(sd), "y_grid": grid.tolist()}
    return _seal("poisson", config, checks, distances, {"samples": len(samples)})


def exponential_partial_sum_reference(size: int, K: int, seed: Optional[int] = None) -> np.ndarray:
    """−log(E_1 + … + E_j), j = 1..K, E_i iid Exp(1); shape (size, K)"""
    rng = np.random.default_rng(settings.REFERENCE_SEED if seed is None else seed)
    return -np.log(np.cumsum(rng.exponential(size=(size, K)), axis=1))


def verify_gumbel(
    batch: Sequence[Sample],
    sd: SaddleData,
    K: int,
    tolerances: Optional[Tolerances] = None,
    reference_seed: Optional[int] = None,
) -> VerificationReport:
    """(L_j − n*ℓ_n)/n* against Gumbel (j = 1) and the exponential partial-sum law."""
    tol = tolerances or Tolerances()
    if K < 1:
        raise DomainError(f"K must be >= 1, got {K}")
    if not batch:
        raise DomainError("verification needs a nonempty batch")
    ell = sd.ell_n
    if not math.isfinite(ell):
        raise DomainError(f"ell_n is undefined for {sd.weights.label} at n={sd.n}")
    longest =[longest_cycles(ct, K) for ct in batch]
    L = np.array([lc.values for lc in longest], dtype=np.float64)
    present = L > 0
    rescaled = (L - sd.n_star * ell) / sd.n_star

    checks: List[Check] = []
    distances: Dict[str, float] = {}
    ks1 = ks_distance(rescaled[present[:, 0], 0], gumbel_cdf)
    distances["ks_gumbel_L1"] = ks1
    checks.append(Check(name="ks_gumbel_L1", observed=ks1, target=0.0, tol=tol.ks_gumbel))

    reference = exponential_partial_sum_reference(len(batch), K, reference_seed)
    for j in range(K):
        column = rescaled[present[:, j], j]
        ks = ks_two_sample(column, reference[:, j])
        distances[f"ks_joint_L{j + 1}"] = ks
        checks.append(Check(name=f"ks_joint_L{j + 1}", observed=ks, target=0.0, tol=tol.ks_joint))
        logger.info(
            "L%d: rescaled mean %.4f, reference mean %.4f, exact -digamma(%d) = %.6f",
            j + 1, float(column.mean()) if column.size else math.nan, float(reference[:, j].mean()), j + 1, -float(digamma(j + 1)),
        )

    jumps = jump_times(L, sd.n_star, ell)
    violations = int(np.count_nonzero((np.diff(jumps, axis=1) < 0) & present[:, 1:])) if K > 1 else 0
    checks.append(Check(name="jump_times_nondecreasing", observed=violations, target=0.0, tol=0.0))

    counts = {"samples": len(batch), "short_samples": int(np.count_nonzero(~present.all(axis=1)))}
    config = {**_saddle_echo(sd), "K": K, "reference_seed": settings.REFERENCE_SEED if reference_seed is None else reference_seed}
    return _seal("gumbel", config, checks, distances, counts)


def cumulative_profile(
    batch: Sequence[Sample],
    alpha: float,
    x_grid: Sequence[float],
    sd: SaddleData,
    tolerances: Optional[Tolerances] = None,
) -> VerificationReport:
    """Mean of w_n(x) = Σ_{k ≥ x·n^{1/(1+α)}} C_k against Σ_{k ≥ x·n^{1/(1+α)}} (θ_k/k) r_n^k."""
    tol = tolerances or Tolerances()
    samples, n = _ascending_lengths(batch)
    if n != sd.n:
        raise DomainError(f"batch has n={n} but saddle data is for n={sd.n}")
    scale = n ** (1.0 / (1.0 + alpha))
    xs = np.asarray(x_grid, dtype=np.float64) * scale
    W = np.stack([_counts_at_least(a, xs) for a in samples])

    checks: List[Check] = []
    distances: Dict[str, float] = {}
    for x, k_min, column in zip(x_grid, xs, W.T):
        observed = float(column.mean())
        predicted = expected_tail_count(sd.weights, sd, k_min)
        name = f"profile_x={x:g}"
        if predicted > 0:
            distances[f"rel_dev_x={x:g}"] = abs(observed - predicted) / predicted
        checks.append(Check(name=name, observed=observed, target=predicted, tol=max(tol.profile_rel * predicted, tol.profile_abs)))

    config = {**_saddle_echo(sd), "alpha": alpha, "x_grid": list(map(float, x_grid)), "scale": scale}
    return _seal("profile", config, checks, distances, {"samples": len(samples)})


def bn_event_frequency(
    batch: Sequence[Sample],
    sd: SaddleData,
    tolerances: Optional[Tolerances] = None,
) -> VerificationReport:
    """Frequency of B_n = {some cycle longer than 2n*ℓ_n} against 2·Σ_{k>2n*ℓ_n}(θ_k/k)e^{−kv_n}."""
    tol = tolerances or Tolerances()
    samples, n = _ascending_lengths(batch)
    cap = threshold(sd, 0.0)
    hits = np.array([a.size > 0 and a[-1] > cap for a in samples])
    frequency = float(hits.mean())
    bound = 2.0 * tail_mass_beyond(sd.weights, sd, cap)
    allowance = max(tol.bn_bound_factor * bound, 5.0 / math.sqrt(len(samples)))

    checks = [
        Check(name="bn_frequency_vs_bound", observed=frequency, target=0.0, tol=allowance),
        Check(name="bn_frequency", observed=frequency, target=0.0, tol=tol.bn_freq),
    ]
    distances = {"markov_bound": bound}
    config = {**_saddle_echo(sd), "cap": cap}
    return _seal("bn", config, checks, distances, {"samples": len(samples), "events": int(hits.sum())})
