# cycleweights/asymptotics.py
"""Saddle point of Σ θ_k e^{−kv} = n, asymptotic expansions and admissibility checks."""
from __future__ import annotations

import logging
import math
from typing import NamedTuple, Optional, Tuple

import numpy as np

from cycleweights.config import settings
from cycleweights.errors import DomainError, NumericError
from cycleweights.models import SaddleData
from cycleweights.scaled import ScaledReal
from cycleweights.schemas import DiagnosticsReport
from cycleweights.special import falling_factorial, riemann_zeta
from cycleweights.weights import Family, WeightSequence, weighted_power_sum

logger = logging.getLogger(__name__)

_UNIT_WEIGHTS = WeightSequence.ewens(1.0)
SADDLE_RESIDUAL_TOL = 1e-9
PARTIAL_SUM_REGIME = 5.0


class PolylogResult(NamedTuple):
    approx: float
    direct: float
    abs_error: float


class PartialSumResult(NamedTuple):
    integral_part: float
    correction: float
    direct: float
    in_regime: bool

    @property
    def remainder(self) -> float:
        return self.direct - self.integral_part - self.correction


def initial_guess(w: WeightSequence, n: int) -> float:
    """v₀ = (n / (c·Γ(α+1)))^{−1/(1+α)} for θ_k ≈ c·k^α"""
    a = w.growth_exponent
    c = w.tail_coefficient
    return (n / (c * math.gamma(a + 1.0))) ** (-1.0 / (1.0 + a))


def ell_from_n_star(n_star: float, alpha: float) -> float:
    base = alpha * math.log(n_star) if n_star > 0 else -math.inf
    if not base > 0:
        raise DomainError(f"ell_n needs alpha*log(n*) > 0 (alpha={alpha}, n*={n_star}); n is too small")
    return base + (alpha - 1.0) * math.log(base)


def ell_n(sd: SaddleData, alpha: float) -> float:
    """ℓ_n = α log n* + (α−1) log(α log n*)"""
    return ell_from_n_star(sd.n_star, alpha)


def threshold(sd: SaddleData, y: float) -> float:
    """x_n(y) = n*(ℓ_n + min{−log y, ℓ_n}); y = 0 gives the cap 2n*ℓ_n"""
    if y < 0:
        raise DomainError(f"y must be nonnegative, got {y!r}")
    if not math.isfinite(sd.ell_n):
        raise DomainError(f"ell_n is undefined for {sd.weights.label} at n={sd.n}")
    shift = sd.ell_n if y == 0 else min(-math.log(y), sd.ell_n)
    return sd.n_star * (sd.ell_n + shift)


def solve_saddle(w: WeightSequence, n: int) -> SaddleData:
    """Safeguarded Newton for the strictly decreasing map v ↦ Σ θ_k e^{−kv}."""
    if n < 1:
        raise DomainError(f"the saddle equation needs n >= 1, got {n}")
    if w.family == Family.TABLE and w.growth_exponent <= 0:
        raise DomainError("table weights need a growing tail for the saddle point")

    v0 = initial_guess(w, n)
    lo, hi = v0 / 10.0, 10.0 * v0
    for _ in range(60):
        if weighted_power_sum(w, lo, 0).value > n:
            break
        lo /= 10.0
    for _ in range(60):
        if weighted_power_sum(w, hi, 0).value < n:
            break
        hi *= 10.0

    v = v0
    trace = []
    converged = False
    for iteration in range(1, settings.SADDLE_MAX_ITER + 1):
        s0 = weighted_power_sum(w, v, 0)
        f = s0.value - n
        trace.append(v)
        logger.debug("saddle n=%d iter=%d v=%.17g residual=%.3g", n, iteration, v, f)
        if abs(f) <= settings.SADDLE_RTOL * n:
            converged = True
            break
        if f > 0:
            lo = v
        else:
            hi = v
        s1 = weighted_power_sum(w, v, 1)
        v_new = v + f / s1.value
        if not (lo < v_new < hi):
            logger.debug("newton step left bracket [%g, %g], bisecting", lo, hi)
            v_new = 0.5 * (lo + hi)
        if abs(v_new - v) <= 4 * np.finfo(float).eps * v:
            v = v_new
            converged = True
            break
        v = v_new

    s0 = weighted_power_sum(w, v, 0)
    if not converged or abs(s0.value - n) > SADDLE_RESIDUAL_TOL * n:
        raise NumericError(
            f"saddle equation for {w.label}, n={n} did not converge in {iteration} iterations",
            trace=trace,
        )
    s1 = weighted_power_sum(w, v, 1)
    g = weighted_power_sum(w, v, -1)
    n_star = 1.0 / v
    alpha = w.growth_exponent
    try:
        ell = ell_from_n_star(n_star, alpha)
    except DomainError:
        ell = math.nan
    return SaddleData(
        weights=w,
        n=n,
        v_n=v,
        n_star=n_star,
        ell_n=ell,
        r_n=math.exp(-v),
        a_n=s0.value,
        b_n=s1.value,
        g_r=g.value,
        truncation_K=max(s0.truncation_K, s1.truncation_K, g.truncation_K),
        residual=abs(s0.value - n),
        tail_bound=s0.tail_bound,
        iterations=iteration,
        trace=tuple(trace),
    )


def polylog_asymp(delta: float, v: float) -> PolylogResult:
    """Σ k^δ e^{−kv} против Γ(δ+1) v^{−δ−1} + ζ(−δ)"""
    if delta < 0 and delta == math.floor(delta):
        raise DomainError(f"delta must not be a negative integer, got {delta!r}")
    if not (0.0 < v < 1.0):
        raise DomainError(f"v must lie in (0, 1), got {v!r}")
    approx = math.gamma(delta + 1.0) * v ** (-delta - 1.0) + riemann_zeta(-delta)
    direct = weighted_power_sum(_UNIT_WEIGHTS, v, delta, rel_tol=1e-14).value
    return PolylogResult(approx, direct, abs(direct - approx))


def partial_sum_asymp(delta: float, v: float, x: float, N_terms: int) -> PartialSumResult:
    """Tail Σ_{k≥⌈x⌉} k^δ e^{−kv} split into the incomplete-gamma series and a boundary term.

    The leading boundary term is c₀·x^δ e^{−xv} with c₀ = BOUNDARY_CONSTANT
    (1/2 from Euler–Maclaurin), not 1.
    """
    if not (v > 0 and x > 0):
        raise DomainError(f"need v > 0 and x > 0, got v={v!r}, x={x!r}")
    if N_terms < 0:
        raise DomainError(f"N_terms must be nonnegative, got {N_terms}")
    in_regime = x * v >= PARTIAL_SUM_REGIME
    if not in_regime:
        logger.warning("partial sum expansion outside its regime: x*v=%.3g < %g", x * v, PARTIAL_SUM_REGIME)
    xv = x * v
    lead = x ** delta * math.exp(-xv)
    series = math.fsum(falling_factorial(delta, j) / xv ** j for j in range(N_terms + 1))
    integral_part = lead / v * series
    c0 = settings.BOUNDARY_CONSTANT
    if c0 != 1.0:
        logger.debug("boundary constant c0=%g in use (leading Euler-Maclaurin term f(x)/2, not f(x))", c0)
    correction = c0 * lead
    start = int(math.ceil(x))
    direct = weighted_power_sum(_UNIT_WEIGHTS, v, delta, start=start, rel_tol=1e-14).value
    return PartialSumResult(integral_part, correction, direct, in_regime)


def saddle_h_estimate(w: WeightSequence, n: int) -> Tuple[ScaledReal, SaddleData]:
    """h_n ≈ (2π)^{−1/2} r_n^{−n} b_n^{−1/2} exp(g_Θ(r_n))"""
    if n < 10:
        raise DomainError(f"saddle estimate needs n >= 10, got {n}")
    sd = solve_saddle(w, n)
    log_est = -0.5 * math.log(2.0 * math.pi) + n * sd.v_n - 0.5 * math.log(sd.b_n) + sd.g_r
    return ScaledReal.from_log(log_est), sd


def expected_tail_count(w: WeightSequence, sd: SaddleData, x: float) -> float:
    """Σ_{k≥max(x,1)} (θ_k/k) r_n^k"""
    if x < 0:
        raise DomainError(f"x must be nonnegative, got {x!r}")
    start = max(int(math.ceil(x)), 1)
    return weighted_power_sum(w, sd.v_n, -1, start=start).value


def tail_mass_beyond(w: WeightSequence, sd: SaddleData, x: float) -> float:
    """Σ_{k>x} (θ_k/k) r_n^k (строгое неравенство)"""
    return weighted_power_sum(w, sd.v_n, -1, start=int(math.floor(x)) + 1).value


def scale_predictions(w: WeightSequence, n: int) -> dict:
    alpha = w.growth_exponent
    return {
        "typical_cycle_scale": n ** (1.0 / (1.0 + alpha)),
        "cycle_number_scale": n ** (alpha / (1.0 + alpha)),
    }


def default_xi(alpha: float, offset: Optional[float] = None) -> float:
    """ξ inside ((α+3)/3, (α+2)/2); upper end minus offset, else the midpoint"""
    lo, hi = (alpha + 3.0) / 3.0, (alpha + 2.0) / 2.0
    xi = hi - (settings.XI_OFFSET if offset is None else offset)
    if not lo < xi < hi:
        xi = 0.5 * (lo + hi)
    return xi


def _real_part_profile(coef: np.ndarray, ks: np.ndarray, phis: np.ndarray, rows: int = 64) -> np.ndarray:
    out = np.empty(phis.shape)
    for i in range(0, phis.size, rows):
        block = phis[i:i + rows]
        out[i:i + rows] = np.cos(np.outer(block, ks)) @ coef
    return out


def admissibility_diagnostics(
    w: WeightSequence,
    n: int,
    s: float,
    y: float,
    xi: Optional[float] = None,
    grid_points: Optional[int] = None,
) -> DiagnosticsReport:
    """Numeric look at the admissibility conditions for
    g_{n,s}(t) = (e^s−1)Σ_{k≥x_n(y)}(θ_k/k)t^k + g_Θ(t) at r_n = e^{−v_n}.
    """
    if n < 100:
        raise DomainError(f"diagnostics need n >= 100, got {n}")
    if not y > 0:
        raise DomainError(f"y must be positive, got {y!r}")
    sd = solve_saddle(w, n)
    alpha = sd.alpha
    x = threshold(sd, y)
    start = max(int(math.ceil(x)), 1)
    boost = math.expm1(s)

    a = sd.a_n
    b = sd.b_n
    if boost != 0.0:
        a += boost * weighted_power_sum(w, sd.v_n, 0, start=start).value
        b += boost * weighted_power_sum(w, sd.v_n, 1, start=start).value

    residual = abs(a - n) / math.sqrt(b)
    xi = default_xi(alpha) if xi is None else xi
    delta_n = sd.v_n ** xi
    width = delta_n ** 2 * b - math.log(b)

    K = sd.truncation_K
    ks = np.arange(1, K + 1, dtype=np.float64)
    coef = np.exp(w.log_theta_array(K) - np.log(ks) - ks * sd.v_n)
    coef[ks >= x] *= math.exp(s)
    phis = np.linspace(delta_n, math.pi, grid_points or settings.MONOTONICITY_GRID)
    profile = _real_part_profile(coef, ks, phis)
    reference = profile[0]
    violations = int(np.count_nonzero(profile[1:] > reference + 1e-12 * abs(reference)))
    if violations:
        logger.warning("monotonicity scan: %d grid points exceed Re g at delta_n (n=%d, s=%g)", violations, n, s)

    bn_ratio = b / (math.gamma(alpha + 2.0) * sd.n_star ** (alpha + 2.0))
    return DiagnosticsReport(
        residual=residual,
        width=width,
        monotonicity_violations=violations,
        bn_ratio=bn_ratio,
        a_n=a,
        b_n=b,
        xi=xi,
        delta_n=delta_n,
        width_core=delta_n ** 2 * b,
        grid_points=int(phis.size),
    )
