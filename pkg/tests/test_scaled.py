# tests/test_scaled.py
import math

import numpy as np
import pytest

from cycleweights import scaled
from cycleweights.scaled import ScaledReal


def test_from_float_normalizes_mantissa():
    x = ScaledReal.from_float(3.0)
    assert x.mantissa == 1.5
    assert x.exponent == 1
    assert x.to_float() == 3.0


def test_zero_is_canonical():
    assert ScaledReal.from_float(0.0) == ScaledReal()
    assert ScaledReal().log() == -math.inf


def test_negative_values_are_rejected():
    with pytest.raises(ValueError):
        ScaledReal.from_float(-1.0)


def test_values_beyond_double_range():
    big = ScaledReal.from_log(5000.0)
    assert big.to_float() == math.inf
    assert big.log() == pytest.approx(5000.0, rel=1e-14)
    assert (big * big).log() == pytest.approx(10000.0, rel=1e-14)
    assert (big / big).to_float() == pytest.approx(1.0, rel=1e-14)


def test_addition_aligns_exponents():
    a = ScaledReal.from_parts(1.0, 2000)
    assert (a + a) == ScaledReal(1.0, 2001)
    tiny = ScaledReal.from_parts(1.0, -2000)
    assert (a + tiny) == a


def test_ratio_of_huge_values():
    a = ScaledReal.from_parts(3.0, 4000)
    b = ScaledReal.from_parts(1.5, 4000)
    assert a.ratio(b) == pytest.approx(2.0)


def test_scaled_dot_mixed_exponents():
    a = scaled.from_log_array(np.array([1000.0, 0.0, -np.inf]))
    b = scaled.from_log_array(np.array([-1000.0, 0.0, 5.0]))
    assert scaled.scaled_dot(a[0], a[1], b[0], b[1]).to_float() == pytest.approx(2.0, rel=1e-12)


def test_exp_series_of_geometric_generating_function():
    # exp(−log(1−t)) = 1/(1−t): k·g_k = 1 gives F_j = 1
    coeffs = scaled.from_float_array(np.r_[0.0, np.ones(30)])
    out = scaled.exp_series(coeffs, 30)
    np.testing.assert_allclose(scaled.to_log_array(out), 0.0, atol=1e-13)


def test_series_product_and_pairing():
    ones = scaled.from_float_array(np.ones(8))
    prod = scaled.series_product(ones, ones, 7)
    np.testing.assert_allclose(np.exp(scaled.to_log_array(prod)), np.arange(1, 9), rtol=1e-14)
    assert scaled.coefficient_pairing(ones, ones, 5).to_float() == pytest.approx(6.0)


def test_entry_and_store():
    arr = scaled.zeros(3)
    scaled.store(arr, 1, ScaledReal.from_float(12.0))
    assert scaled.entry(arr, 1).to_float() == 12.0
    assert scaled.entry(arr, 2).is_zero
