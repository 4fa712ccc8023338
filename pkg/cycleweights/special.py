# cycleweights/special.py
"""Scalar special functions used by the asymptotic expansions."""
import math

import mpmath
from scipy import special as sps

from cycleweights.errors import DomainError


def riemann_zeta(s: float) -> float:
    """ζ(s) для вещественного s ≠ 1"""
    if s == 1.0:
        raise DomainError("zeta has a pole at s = 1")
    if s > 1.0:
        return float(sps.zeta(s))
    if s < 0.0:
        if s == math.floor(s) and int(s) % 2 == 0:
            return 0.0  # trivial zeros
        # functional equation
        return (
            2.0 ** s
            * math.pi ** (s - 1.0)
            * math.sin(math.pi * s / 2.0)
            * math.gamma(1.0 - s)
            * float(sps.zeta(1.0 - s))
        )
    with mpmath.workdps(20):
        return float(mpmath.zeta(s))


def falling_factorial(delta: float, j: int) -> float:
    """(δ)_j = δ(δ−1)⋯(δ−j+1), (δ)_0 = 1"""
    out = 1.0
    for i in range(j):
        out *= delta - i
    return out


def power_tail_bound(delta: float, v: float, K: int) -> float:
    """Upper bound for Σ_{k>K} k^δ e^{−kv}.

    Integral comparison needs a decreasing summand on [K, ∞), i.e.
    K ≥ δ/v when δ > 0; callers pick K accordingly.
    """
    if K < 1:
        raise DomainError("tail bound needs K >= 1")
    if delta > 0 and K * v < delta:
        raise DomainError(f"summand still increasing at K={K} (delta={delta}, v={v})")
    if delta > -1.0:
        a = delta + 1.0
        return math.exp(math.lgamma(a) - a * math.log(v)) * float(sps.gammaincc(a, K * v))
    return K ** delta * math.exp(-(K + 1) * v) / (-math.expm1(-v))
