# tests/test_weights.py
import math

import numpy as np
import pytest

from cycleweights.errors import DomainError
from cycleweights.weights import Family, WeightSequence, g_theta_partial, theta_eval, weighted_power_sum


def test_polynomial_weights(linear):
    np.testing.assert_array_equal(linear.theta_array(5), [1.0, 2.0, 3.0, 4.0, 5.0])
    value, log_value = theta_eval(WeightSequence.polynomial(2.0), 3)
    assert value == 9.0
    assert log_value == pytest.approx(2 * math.log(3))


def test_ewens_weights_are_constant(ewens2):
    assert theta_eval(ewens2, 1) == theta_eval(ewens2, 10 ** 9)
    assert ewens2.growth_exponent == 0.0


def test_huge_index_stays_finite_in_log_space():
    value, log_value = theta_eval(WeightSequence.polynomial(50.0), 10 ** 12)
    assert value == math.inf
    assert log_value == pytest.approx(50 * math.log(1e12))


@pytest.mark.parametrize("k", [0, -3, 1.5, True])
def test_theta_rejects_bad_indices(linear, k):
    with pytest.raises(DomainError):
        theta_eval(linear, k)


@pytest.mark.parametrize("make", [
    lambda: WeightSequence.polynomial(0.0),
    lambda: WeightSequence.polynomial(-1.0),
    lambda: WeightSequence.ewens(0.0),
    lambda: WeightSequence.table([]),
    lambda: WeightSequence.table([1.0, -2.0]),
])
def test_invalid_families(make):
    with pytest.raises(DomainError):
        make()


def test_table_weights_extrapolate_last_entries():
    w = WeightSequence.table([1.0, 2.0, 3.0])
    assert w.family == Family.TABLE
    assert theta_eval(w, 2)[0] == 2.0
    assert w.alpha_fit == pytest.approx(1.0)
    assert theta_eval(w, 6)[0] == pytest.approx(6.0)


def test_table_weights_allow_zeros():
    w = WeightSequence.table([0.0, 1.0, 1.0])
    assert theta_eval(w, 1) == (0.0, -math.inf)


def test_g_theta_ewens_is_a_logarithm():
    res = g_theta_partial(WeightSequence.ewens(1.0), 0.5, 1e-12)
    assert res.value == pytest.approx(math.log(2.0), abs=2e-12)
    assert res.tail_bound <= 1e-12


@pytest.mark.parametrize("alpha, t, exact", [
    (1.0, 0.9, 9.0),  # Σ t^k = t/(1−t)
    (2.0, 0.5, 2.0),  # Σ k t^k = t/(1−t)²
])
def test_g_theta_polynomial_closed_forms(alpha, t, exact):
    res = g_theta_partial(WeightSequence.polynomial(alpha), t, 1e-11)
    assert res.value == pytest.approx(exact, abs=1e-9)
    assert res.truncation_K > 0


def test_g_theta_domain(linear):
    assert g_theta_partial(linear, 0.0, 1e-12) == (0.0, 0, 0.0)
    with pytest.raises(DomainError):
        g_theta_partial(linear, 1.0, 1e-12)
    with pytest.raises(DomainError):
        g_theta_partial(linear, 0.5, 0.0)


def test_weighted_power_sum_geometric():
    w = WeightSequence.ewens(1.0)
    v = 0.1
    res = weighted_power_sum(w, v, 0)
    assert res.value == pytest.approx(1.0 / math.expm1(v), rel=1e-12)
    actual_tail = math.exp(-(res.truncation_K + 1) * v) / -math.expm1(-v)
    assert res.tail_bound >= actual_tail


def test_weighted_power_sum_from_start():
    res = weighted_power_sum(WeightSequence.ewens(1.0), 0.1, 0, start=11)
    assert res.value == pytest.approx(math.exp(-1.1) / -math.expm1(-0.1), rel=1e-12)


def test_weighted_power_sum_negative_power_cancels_growth(linear):
    # θ_k/k = 1
    res = weighted_power_sum(linear, 0.05, -1)
    assert res.value == pytest.approx(1.0 / math.expm1(0.05), rel=1e-12)


def test_weighted_power_sum_needs_positive_v(linear):
    with pytest.raises(DomainError):
        weighted_power_sum(linear, 0.0, 0)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_g_theta_nondecreasing_in_t(alpha):
    w = WeightSequence.polynomial(alpha)
    values = [g_theta_partial(w, t, 1e-12).value for t in np.linspace(0.0, 0.95, 20)]
    assert all(a <= b for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("w", [
    WeightSequence.polynomial(0.5),
    WeightSequence.polynomial(2.0),
    WeightSequence.ewens(3.0),
], ids=lambda w: w.label)
@pytest.mark.parametrize("t", [0.3, 0.9])
def test_g_theta_tail_bound_is_certified(w, t):
    coarse = g_theta_partial(w, t, 1e-8)
    fine = g_theta_partial(w, t, 1e-10)
    assert fine.truncation_K >= coarse.truncation_K
    assert abs(fine.value - coarse.value) <= coarse.tail_bound + 1e-15 * fine.value


@pytest.mark.parametrize("t", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_g_theta_linear_weights_geometric(linear, t):
    assert g_theta_partial(linear, t, 1e-12).value == pytest.approx(t / (1 - t), abs=1e-10)
