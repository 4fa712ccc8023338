# tests/test_stats.py
import math

import numpy as np
import pytest
from scipy.special import digamma

from cycleweights.asymptotics import solve_saddle, tail_mass_beyond, threshold
from cycleweights.errors import DomainError
from cycleweights.exact_oracle import build_h_table, enumerate_cycle_types
from cycleweights.models import CycleType, ProcessSample
from cycleweights.sampler import sample_batch
from cycleweights.schemas import SamplerConfig
from cycleweights.stats import (
    bn_event_frequency,
    cumulative_profile,
    exponential_partial_sum_reference,
    gumbel_cdf,
    longest_cycles,
    poisson_tv,
    process_path,
    tv_distance,
    verify_gumbel,
    verify_poisson_increments,
)
from cycleweights.weights import WeightSequence


@pytest.fixture(scope="module")
def small_run():
    """α = 1, n = 2000, 300 samples"""
    w = WeightSequence.polynomial(1.0)
    sd = solve_saddle(w, 2000)
    batch = list(sample_batch(w, build_h_table(w, 2000), SamplerConfig(n=2000, num_samples=300, seed=17)))
    return sd, batch


def test_longest_cycles():
    ct = CycleType.from_lengths([5, 3, 3, 1])
    assert longest_cycles(ct, 3) == ((5, 3, 3), False)
    assert longest_cycles(ct, 6) == ((5, 3, 3, 1, 0, 0), True)
    assert longest_cycles(ProcessSample.from_cycle_type(ct), 2).values == (5, 3)
    with pytest.raises(DomainError):
        longest_cycles(ct, 0)


def test_longest_cycles_agree_with_sorting(small_run):
    _, batch = small_run
    for ct in batch[:50]:
        lengths = ct.lengths_desc()
        K = 5
        expected = tuple(lengths[:K]) + (0,) * max(0, K - len(lengths))
        assert longest_cycles(ct, K).values == expected


@pytest.mark.parametrize("n", range(1, 11))
def test_longest_cycles_exhaustive(linear, n):
    for ct, _ in enumerate_cycle_types(linear, n):
        lengths = ct.lengths_desc()
        K = n + 1
        assert longest_cycles(ct, K).values == tuple(lengths) + (0,) * (K - len(lengths))


def test_distribution_helpers():
    assert gumbel_cdf(0.0) == pytest.approx(math.exp(-1.0))
    assert tv_distance({0: 0.5, 1: 0.5}, {0: 1.0}) == pytest.approx(0.5)
    assert poisson_tv(np.zeros(100, dtype=int), 0.0) == 0.0
    assert poisson_tv(np.ones(10, dtype=int), 0.0) == 1.0


def test_exponential_reference_means():
    ref = exponential_partial_sum_reference(200000, 3, seed=1)
    for j in range(3):
        assert ref[:, j].mean() == pytest.approx(-digamma(j + 1), abs=0.02)


def test_process_path_matches_direct_counts(linear):
    sd = solve_saddle(linear, 2000)
    ct = CycleType.from_lengths([1500, 300, 150, 40, 9, 1])
    path = process_path(ct, sd, 1.0)
    assert np.all(np.diff(path.jump_times) >= 0)
    # the 1500-cycle sits above the cap 2n*ℓ_n
    assert path(0.0) == path.count_at(0.0) == 1
    for y in np.linspace(0.013, 7.3, 61):
        assert path(y) == path.count_at(y)
    with pytest.raises(DomainError):
        process_path(CycleType.from_lengths([3, 1]), sd, 1.0)


def test_process_path_on_sampled_cycle_types(small_run):
    sd, batch = small_run
    ys = np.linspace(0.0, 9.0, 91)
    for ct in batch[:40]:
        path = process_path(ct, sd, 1.0)
        counts = [path(y) for y in ys]
        assert counts == [ct.tail_count(threshold(sd, y)) for y in ys]
        assert all(a <= b for a, b in zip(counts, counts[1:]))


def test_verification_needs_samples(small_run):
    sd, _ = small_run
    with pytest.raises(DomainError):
        verify_poisson_increments([], sd, [0.5, 1.0])
    with pytest.raises(DomainError):
        verify_poisson_increments([CycleType.from_lengths([2])], sd, [0.5])


def test_poisson_report_shape(small_run):
    sd, batch = small_run
    report = verify_poisson_increments(batch, sd, [0.5, 1.0, 2.0])
    names = [c.name for c in report.checks]
    assert sum(name.endswith("_mean") for name in names) == 3
    assert sum(name.startswith("corr_") for name in names) == 3
    assert report.counts["samples"] == 300
    assert report.config["y_grid"] == [0.5, 1.0, 2.0]
    assert '"pass"' in report.to_json()


def test_cumulative_profile_small_run(small_run):
    sd, batch = small_run
    report = cumulative_profile(batch, 1.0, [1.0], sd)
    check = report.checks[0]
    assert check.target > 0
    assert check.passed


def test_bn_report_small_run(small_run):
    sd, batch = small_run
    report = bn_event_frequency(batch, sd)
    assert report.distances["markov_bound"] > 0
    assert {c.name for c in report.checks} == {"bn_frequency_vs_bound", "bn_frequency"}
    assert report.counts["events"] <= report.counts["samples"]


def test_gumbel_rejects_undefined_centering():
    sd = solve_saddle(WeightSequence.ewens(2.0), 200)
    with pytest.raises(DomainError):
        verify_gumbel([CycleType.from_lengths([200])], sd, 2)


@pytest.mark.slow
def test_poisson_increments_at_desk_scale(desk_run):
    sd, batch = desk_run
    report = verify_poisson_increments(batch, sd, [0.5, 1.0, 2.0])
    assert report.passed, report.failed_checks()


@pytest.mark.slow
def test_gumbel_at_desk_scale(desk_run):
    sd, batch = desk_run
    report = verify_gumbel(batch, sd, 3)
    assert report.distances["ks_gumbel_L1"] < 0.1
    assert report.distances["ks_joint_L2"] < 0.12
    assert report.distances["ks_joint_L3"] < 0.12
    assert report.passed, report.failed_checks()


@pytest.mark.slow
def test_bn_at_desk_scale(desk_run):
    sd, batch = desk_run
    report = bn_event_frequency(batch, sd)
    assert report.passed, report.failed_checks()


@pytest.mark.slow
def test_profile_at_desk_scale(desk_run):
    sd, batch = desk_run
    report = cumulative_profile(batch, 1.0, [0.5, 1.0, 2.0], sd)
    assert report.passed, report.failed_checks()


def test_poisson_report_with_repeated_grid_point(small_run):
    sd, batch = small_run
    report = verify_poisson_increments(batch, sd, [0.5, 1.0, 1.0])
    checks = {c.name: c for c in report.checks}
    assert checks["increment_3_mean"].observed == 0.0
    assert checks["increment_3_mean"].target == 0.0
    assert checks["increment_3_mean"].passed
    assert checks["increment_3_tv"].passed
    assert "increment_3_dispersion" not in checks
    assert checks["corr_1_3"].observed == 0.0


def test_bn_bound_decreases_with_n(linear):
    bounds = []
    for n in (10 ** 3, 10 ** 4):
        sd = solve_saddle(linear, n)
        bounds.append(2.0 * tail_mass_beyond(linear, sd, threshold(sd, 0.0)))
    assert bounds[0] > bounds[1] > 0
