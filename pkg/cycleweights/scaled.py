# cycleweights/scaled.py
"""Overflow-safe positive reals (mantissa in [1, 2) times a power of two).

Scalars are ScaledReal; tables and power series are kept as a pair of numpy
arrays (mantissas, exponents). Zero entries carry mantissa 0 and the
ZERO_EXPONENT sentinel so they never win a max-exponent alignment.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

LN2 = math.log(2.0)
ZERO_EXPONENT = -(2 ** 40)
# ldexp shifts below this underflow to zero anyway
_MIN_SHIFT = -1100

ScaledArray = Tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True)
class ScaledReal:
    mantissa: float = 0.0
    exponent: int = 0

    def __post_init__(self):
        m = self.mantissa
        if m == 0.0:
            if self.exponent != 0:
                object.__setattr__(self, "exponent", 0)
            return
        if not (1.0 <= m < 2.0):
            raise ValueError(f"mantissa {m!r} is not normalized to [1, 2)")

    @classmethod
    def from_parts(cls, value: float, exponent: int = 0) -> "ScaledReal":
        """Нормализация произвольного value * 2**exponent"""
        if value < 0 or math.isnan(value):
            raise ValueError(f"ScaledReal must be nonnegative, got {value!r}")
        if value == 0.0:
            return cls()
        if math.isinf(value):
            raise OverflowError("cannot scale an infinite value")
        m, e = math.frexp(value)
        return cls(m * 2.0, int(exponent) + e - 1)

    @classmethod
    def from_float(cls, value: float) -> "ScaledReal":
        return cls.from_parts(value)

    @classmethod
    def from_log(cls, log_value: float) -> "ScaledReal":
        if log_value == -math.inf:
            return cls()
        if math.isnan(log_value) or math.isinf(log_value):
            raise ValueError(f"cannot scale log value {log_value!r}")
        e = math.floor(log_value / LN2)
        return cls.from_parts(math.exp(log_value - e * LN2), e)

    @property
    def is_zero(self) -> bool:
        return self.mantissa == 0.0

    def log(self) -> float:
        if self.is_zero:
            return -math.inf
        return math.log(self.mantissa) + self.exponent * LN2

    def to_float(self) -> float:
        if self.is_zero:
            return 0.0
        try:
            return math.ldexp(self.mantissa, self.exponent)
        except OverflowError:
            return math.inf

    def __float__(self) -> float:
        return self.to_float()

    def __mul__(self, other: "ScaledReal") -> "ScaledReal":
        if self.is_zero or other.is_zero:
            return ScaledReal()
        return ScaledReal.from_parts(self.mantissa * other.mantissa, self.exponent + other.exponent)

    def __truediv__(self, other: "ScaledReal") -> "ScaledReal":
        if other.is_zero:
            raise ZeroDivisionError("division by a zero ScaledReal")
        if self.is_zero:
            return ScaledReal()
        return ScaledReal.from_parts(self.mantissa / other.mantissa, self.exponent - other.exponent)

    def __add__(self, other: "ScaledReal") -> "ScaledReal":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        top = max(self.exponent, other.exponent)
        shift_a = max(self.exponent - top, _MIN_SHIFT)
        shift_b = max(other.exponent - top, _MIN_SHIFT)
        total = math.ldexp(self.mantissa, shift_a) + math.ldexp(other.mantissa, shift_b)
        return ScaledReal.from_parts(total, top)

    def ratio(self, other: "ScaledReal") -> float:
        """self / other как обычное число"""
        return (self / other).to_float()

    def scale(self, factor: float) -> "ScaledReal":
        if factor == 0.0 or self.is_zero:
            return ScaledReal()
        return ScaledReal.from_parts(self.mantissa * factor, self.exponent)


# -- array helpers -----------------------------------------------------------

def zeros(length: int) -> ScaledArray:
    return np.zeros(length, dtype=np.float64), np.full(length, ZERO_EXPONENT, dtype=np.int64)


def from_log_array(log_values: np.ndarray) -> ScaledArray:
    log_values = np.asarray(log_values, dtype=np.float64)
    finite = np.isfinite(log_values)
    exps = np.full(log_values.shape, ZERO_EXPONENT, dtype=np.int64)
    mants = np.zeros(log_values.shape, dtype=np.float64)
    e = np.floor(log_values[finite] / LN2)
    mants[finite] = np.exp(log_values[finite] - e * LN2)
    exps[finite] = e.astype(np.int64)
    # exp() round-off can land exactly on 2.0
    over = mants >= 2.0
    mants[over] /= 2.0
    exps[over] += 1
    return mants, exps


def from_float_array(values: np.ndarray) -> ScaledArray:
    values = np.asarray(values, dtype=np.float64)
    if np.any(values < 0):
        raise ValueError("scaled arrays hold nonnegative values only")
    m, e = np.frexp(values)
    mants = m * 2.0
    exps = e.astype(np.int64) - 1
    exps[values == 0.0] = ZERO_EXPONENT
    return mants, exps


def to_log_array(arr: ScaledArray) -> np.ndarray:
    mants, exps = arr
    out = np.full(mants.shape, -np.inf)
    nz = mants > 0
    out[nz] = np.log(mants[nz]) + exps[nz] * LN2
    return out


def entry(arr: ScaledArray, index: int) -> ScaledReal:
    mants, exps = arr
    m = float(mants[index])
    if m == 0.0:
        return ScaledReal()
    return ScaledReal(m, int(exps[index]))


def scaled_dot(a_mant: np.ndarray, a_exp: np.ndarray, b_mant: np.ndarray, b_exp: np.ndarray) -> ScaledReal:
    """Σ a_i b_i без переполнения: выравнивание по максимальной экспоненте"""
    if a_mant.size == 0:
        return ScaledReal()
    exps = a_exp + b_exp
    prods = a_mant * b_mant
    nz = prods > 0
    if not np.any(nz):
        return ScaledReal()
    top = int(exps[nz].max())
    shifts = np.maximum(exps - top, _MIN_SHIFT).astype(np.int32)
    total = float(np.sum(np.ldexp(prods, shifts)))
    return ScaledReal.from_parts(total, top)


def store(arr: ScaledArray, index: int, value: ScaledReal) -> None:
    mants, exps = arr
    if value.is_zero:
        mants[index] = 0.0
        exps[index] = ZERO_EXPONENT
    else:
        mants[index] = value.mantissa
        exps[index] = value.exponent


def exp_series(coeffs: ScaledArray, degree: int) -> ScaledArray:
    """Коэффициенты F = exp(G) до степени degree.

    coeffs[k] holds k·g_k for k = 1..degree (index 0 ignored); the
    recurrence is j·F_j = Σ_{k=1}^{j} k·g_k·F_{j−k} with F_0 = 1.
    """
    c_mant, c_exp = coeffs
    if c_mant.shape[0] < degree + 1:
        raise ValueError("coefficient array shorter than requested degree")
    out = zeros(degree + 1)
    store(out, 0, ScaledReal(1.0, 0))
    f_mant, f_exp = out
    for j in range(1, degree + 1):
        acc = scaled_dot(c_mant[1:j + 1], c_exp[1:j + 1], f_mant[j - 1::-1], f_exp[j - 1::-1])
        store(out, j, acc.scale(1.0 / j))
    return out


def series_product(a: ScaledArray, b: ScaledArray, degree: int) -> ScaledArray:
    """Произведение рядов с обрезкой до степени degree"""
    out = zeros(degree + 1)
    a_mant, a_exp = a
    b_mant, b_exp = b
    for j in range(degree + 1):
        lo = max(0, j - (b_mant.shape[0] - 1))
        hi = min(j, a_mant.shape[0] - 1)
        if lo > hi:
            continue
        idx = np.arange(lo, hi + 1)
        store(out, j, scaled_dot(a_mant[idx], a_exp[idx], b_mant[j - idx], b_exp[j - idx]))
    return out


def coefficient_pairing(a: ScaledArray, b: ScaledArray, degree: int) -> ScaledReal:
    """[t^degree] a(t)·b(t)"""
    a_mant, a_exp = a
    b_mant, b_exp = b
    lo = max(0, degree - (b_mant.shape[0] - 1))
    hi = min(degree, a_mant.shape[0] - 1)
    if lo > hi:
        return ScaledReal()
    idx = np.arange(lo, hi + 1)
    return scaled_dot(a_mant[idx], a_exp[idx], b_mant[degree - idx], b_exp[degree - idx])
