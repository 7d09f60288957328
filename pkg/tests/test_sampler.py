import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsharvest.errors import DomainError
from tsharvest.levy import LevyParams, band_mass, band_mean, second_moment, tail_mean, truncated_second_moment
from tsharvest.sampler import (
    DEFAULT_SEED,
    JumpScheme,
    RngStream,
    SmallJumpMode,
    build_scheme,
    sample_band_jump,
    sample_band_jumps,
    sample_increment,
    sample_increments,
    sample_jump_batch,
)

DT = 1e-3


def pareto_cdf(z, lo, hi, beta):
    top = 0.0 if math.isinf(hi) else hi ** -beta
    return (lo ** -beta - z ** -beta) / (lo ** -beta - top)


def test_build_scheme_examples(levy):
    s = build_scheme(levy, 0.01)
    assert s.nu_mid + s.nu_tail == pytest.approx(band_mass(0.01, math.inf, levy), rel=1e-10)
    assert s.small_var == pytest.approx(0.01 ** 1.3 / 1.3, rel=1e-2)
    assert s.small_var == truncated_second_moment(0.01, levy)
    assert s.drift_correction == -band_mean(0.01, 1.0, levy)
    edge = build_scheme(levy, 1 - 1e-9)
    assert edge.nu_mid < 1e-8 and abs(edge.drift_correction) < 1e-8
    for bad in (0.0, 1.0, -0.1):
        with pytest.raises(DomainError):
            build_scheme(levy, bad)


def test_gaussian_downgrade(levy):
    s = build_scheme(levy, 1e-3)
    assert s.effective_mode(DT) is SmallJumpMode.GAUSSIAN
    tiny = build_scheme(levy, 1e-9)
    assert tiny.small_var * 1e-7 < 1e-18
    assert tiny.effective_mode(1e-7) is SmallJumpMode.DRIFT_ONLY
    assert build_scheme(levy, 1e-3, SmallJumpMode.DRIFT_ONLY).effective_mode(DT) is SmallJumpMode.DRIFT_ONLY


@pytest.mark.parametrize("lo,hi", [(0.01, 1.0), (1.0, math.inf), (0.3, 0.31)])
def test_band_jump_support(levy, lo, hi):
    z = sample_band_jumps(20_000, lo, hi, levy, RngStream(3, 0))
    assert np.all(z >= lo) and np.all(z < hi)
    assert lo <= sample_band_jump(lo, hi, levy, RngStream(3, 1)) < hi


@pytest.mark.parametrize("lo,hi", [(0.01, 1.0), (1.0, math.inf)])
def test_band_jump_matches_truncated_pareto_when_untempered(lo, hi):
    from scipy.stats import kstest
    lp = LevyParams(0.7, 1e-12)
    z = sample_band_jumps(100_000, lo, hi, lp, RngStream(11, 0))
    stat = kstest(z, lambda x: pareto_cdf(x, lo, hi, 0.7)).statistic
    assert stat < 0.01


def test_band_jump_mean(levy):
    z = sample_band_jumps(1_000_000, 0.01, 1.0, levy, RngStream(DEFAULT_SEED, 5))
    ref = band_mean(0.01, 1.0, levy) / band_mass(0.01, 1.0, levy)
    se = z.std(ddof=1) / math.sqrt(z.size)
    assert abs(z.mean() - ref) < 3 * se


def test_band_jump_argument_checks(levy):
    with pytest.raises(DomainError):
        sample_band_jumps(5, 0.0, 1.0, levy, RngStream())
    with pytest.raises(DomainError):
        sample_band_jumps(5, 1.0, 1.0, levy, RngStream())
    assert sample_band_jumps(0, 0.1, 1.0, levy, RngStream()).size == 0


def test_increment_mean_four_se(levy):
    x = sample_increments(1_000_000, DT, build_scheme(levy, 1e-3), levy, RngStream(DEFAULT_SEED, 0))
    se = x.std(ddof=1) / math.sqrt(x.size)
    assert abs(x.mean() - DT * tail_mean(levy)) < 4 * se


def test_increment_variance_pooled_over_seeds(levy):
    # a single 1e6 sample has ~6% relative sampling error in its variance, driven by
    # the heavy fourth moment of the measure; pooling 20 seeds brings it near 1.3%
    scheme = build_scheme(levy, 1e-3)
    v = [sample_increments(1_000_000, DT, scheme, levy, RngStream(s, 0)).var(ddof=1) for s in range(20)]
    assert float(np.mean(v)) == pytest.approx(DT * second_moment(levy), rel=0.05)


def test_increment_variance_within_sampling_error(levy):
    scheme = build_scheme(levy, 1e-3)
    x = sample_increments(1_000_000, DT, scheme, levy, RngStream(DEFAULT_SEED, 1))
    c = x - x.mean()
    v = np.mean(c * c)
    se = math.sqrt((np.mean(c ** 4) - v * v) / x.size)
    assert abs(v - DT * second_moment(levy)) < 4 * se


def test_drift_only_variance(levy):
    scheme = build_scheme(levy, 0.01, SmallJumpMode.DRIFT_ONLY)
    x = sample_increments(1_000_000, DT, scheme, levy, RngStream(8, 0))
    c = x - x.mean()
    v = np.mean(c * c)
    se = math.sqrt((np.mean(c ** 4) - v * v) / x.size)
    target = DT * (second_moment(levy) - truncated_second_moment(0.01, levy))
    assert abs(v - target) < 4 * se


def test_refinement_consistency(levy):
    # eps 0.01 -> 0.005 in DriftOnly mode adds the independent marks in [0.005, 0.01)
    n = 1_000_000
    coarse = sample_increments(n, DT, build_scheme(levy, 0.01, SmallJumpMode.DRIFT_ONLY), levy, RngStream(9, 0))
    rng = RngStream(9, 1)
    k = rng.generator.poisson(band_mass(0.005, 0.01, levy) * DT * n)
    where = rng.generator.integers(0, n, size=k)
    extra = np.bincount(where, weights=sample_band_jumps(k, 0.005, 0.01, levy, rng), minlength=n)
    fine = coarse + extra - DT * band_mean(0.005, 0.01, levy)
    bound = DT * (truncated_second_moment(0.01, levy) - truncated_second_moment(0.005, levy))
    change = fine.var() - coarse.var()
    cross_se = 2 * math.sqrt(extra.var() * coarse.var() / n)
    assert abs(change) < bound + 4 * cross_se
    # the refined scheme's own drift correction is the same bookkeeping
    assert build_scheme(levy, 0.005).drift_correction == pytest.approx(
        build_scheme(levy, 0.01).drift_correction - band_mean(0.005, 0.01, levy), rel=1e-10)


def test_degenerate_scheme_is_deterministic(levy):
    s = JumpScheme(eps=1e-3, mode=SmallJumpMode.DRIFT_ONLY, band_split=1.0, nu_mid=0.0, nu_tail=0.0,
                   drift_correction=-0.7, small_var=0.0)
    x = sample_increments(1000, DT, s, levy, RngStream(1, 0))
    assert np.all(x == -0.7 * DT)
    assert sample_increment(DT, s, levy, RngStream(1, 0)) == -0.7 * DT


def test_reproducible_streams(levy):
    s = build_scheme(levy)
    a = sample_increments(10_000, DT, s, levy, RngStream(42, 3))
    b = sample_increments(10_000, DT, s, levy, RngStream(42, 3))
    c = sample_increments(10_000, DT, s, levy, RngStream(42, 4))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(RngStream(42, (1, 2)).generator.random(4), RngStream(42, (2, 1)).generator.random(4))


def test_jumps_positive_and_drift_negative(levy):
    s = build_scheme(levy, 1e-3, SmallJumpMode.DRIFT_ONLY)
    batch = sample_jump_batch(50_000, DT, s, levy, RngStream(5, 0), sigma=0.005)
    assert np.all(batch.jump_sum >= 0)
    assert np.all(batch.log_jump_sum >= 0)
    assert batch.n_jumps > 0
    # same stream: the log sums consume no extra random numbers
    x = sample_increments(50_000, DT, s, levy, RngStream(5, 0))
    floor = s.drift_correction * DT
    assert np.all(x[batch.jump_sum == 0] == floor)
    assert np.all(x >= floor)


def test_single_increment_agrees_with_batch(levy):
    s = build_scheme(levy, 0.01)
    rng = RngStream(77, 0)
    single = np.array([sample_increment(DT, s, levy, rng) for _ in range(40_000)])
    batch = sample_increments(40_000, DT, s, levy, RngStream(77, 1))
    pooled = math.sqrt(single.var() / single.size + batch.var() / batch.size)
    assert abs(single.mean() - batch.mean()) < 4 * pooled
    with pytest.raises(DomainError):
        sample_increment(0.0, s, levy, rng)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.1, 1.9), st.floats(0.2, 4.0))
def test_increment_mean_across_parameters(beta, lam):
    lp = LevyParams(beta, lam)
    x = sample_increments(200_000, DT, build_scheme(lp, 1e-2), lp, RngStream(13, 0))
    se = x.std(ddof=1) / math.sqrt(x.size)
    assert abs(x.mean() - DT * tail_mean(lp)) < 5 * se
