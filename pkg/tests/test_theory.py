"""Tests for the closed-form constants and their sampling checks."""

import numpy as np
import pytest

from lsopt.theory import (
    compute_beta,
    eigen_product_check,
    empirical_variance_ratio,
    monte_carlo_ratio,
    ratio_tail_bound,
    variance_ratio_bound,
)

# printed reference values: rows m, columns sigma = 1..5
BETA_TABLE = {
    1000: [0.447, 0.333, 0.277, 0.243, 0.218],
    10000: [0.447, 0.333, 0.277, 0.243, 0.218],
    100000: [0.447, 0.333, 0.277, 0.243, 0.218],
}
# rows n = 1..3, columns sigma = 1..5, at m = 10000
VARIANCE_TABLE = {
    1: [0.268, 0.185, 0.149, 0.129, 0.114],
    2: [0.279, 0.231, 0.207, 0.192, 0.181],
    3: [0.290, 0.256, 0.238, 0.226, 0.218],
}


# ---------------------------------------------------------------- beta
def test_beta_sigma_zero():
    res = compute_beta(0.0, 100)
    assert res.beta_closed == res.beta_sum == 1.0


def test_beta_m2_hand_sum():
    # two-term average: (1 + 1/(1+4)) / 2
    res = compute_beta(1.0, 2)
    assert res.beta_sum == pytest.approx(0.6, abs=1e-14)
    assert res.beta_closed == pytest.approx(0.6, abs=1e-12)


def test_beta_limit():
    res = compute_beta(1.0, 100000)
    assert res.beta_limit == pytest.approx(1.0 / np.sqrt(5.0), abs=1e-15)
    assert abs(res.beta_closed - res.beta_limit) <= 1e-8


@pytest.mark.parametrize("m,expected", BETA_TABLE.items())
def test_beta_table(m, expected):
    for sigma, ref in zip(range(1, 6), expected):
        assert compute_beta(sigma, m).beta_closed == pytest.approx(ref, abs=5e-4)


@pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0, 3.0, 4.0, 5.0])
@pytest.mark.parametrize("m", [2, 10, 100, 1000, 100000])
def test_beta_closed_equals_sum(sigma, m):
    res = compute_beta(sigma, m)
    assert abs(res.beta_closed - res.beta_sum) <= 1e-12


def test_beta_alpha_root_in_unit_interval():
    for sigma in (0.3, 1.0, 7.0):
        res = compute_beta(sigma, 50)
        assert 0.0 < res.alpha < 1.0
        # alpha solves -sigma z^2 + (2 sigma + 1) z - sigma = 0
        assert -sigma * res.alpha**2 + (2 * sigma + 1) * res.alpha - sigma == pytest.approx(
            0.0, abs=1e-12
        )


def test_beta_strictly_decreasing_in_sigma():
    vals = [compute_beta(s, 1000).beta_closed for s in (0.5, 1, 2, 3, 4, 5)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_beta_decreases_toward_limit_in_m():
    # strictly decreasing while the gap to the limit is representable
    res = [compute_beta(1.0, m) for m in (2, 4, 8, 16, 32)]
    vals = [r.beta_closed for r in res]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert all(v > res[0].beta_limit for v in vals)
    assert compute_beta(1.0, 10**6).beta_closed >= res[0].beta_limit


# ---------------------------------------------------------------- tail bound
def test_tail_bound_vacuous_near_threshold():
    m = 10000
    beta = compute_beta(1.0, m).beta_closed
    threshold = np.sqrt(beta) / (1.0 - np.pi / np.sqrt(m))
    val = ratio_tail_bound(threshold * 1.0000001, 1.0, m)
    assert val == pytest.approx(2.0, abs=1e-3)


def test_tail_bound_rejects_inadmissible_alpha():
    with pytest.raises(ValueError):
        ratio_tail_bound(0.5, 1.0, 10000)
    with pytest.raises(ValueError):
        ratio_tail_bound(0.9, 1.0, 9)  # m <= pi^2


def test_tail_bound_regression_value():
    # frozen from a hand evaluation of the explicit formula
    beta = compute_beta(1.0, 10000).beta_closed
    z = (0.8 - 0.8 * np.pi / 100.0 - np.sqrt(beta)) / 1.8
    expect = 2.0 * np.exp(-(2.0 / np.pi**2) * 10000 * z * z)
    assert ratio_tail_bound(0.8, 1.0, 10000) == pytest.approx(expect, rel=1e-12)
    assert expect == pytest.approx(1.74477e-3, rel=1e-4)


def test_tail_bound_vanishes_for_large_m():
    vals = [ratio_tail_bound(0.8, 1.0, m) for m in (10**4, 10**5, 10**6)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-30


# ---------------------------------------------------------------- Monte-Carlo ratio
def test_mc_ratio_sigma_zero_is_one():
    res = monte_carlo_ratio(0.0, 50, 200, seed=1)
    assert res.mean == pytest.approx(1.0, abs=1e-12)
    assert res.std == pytest.approx(0.0, abs=1e-12)


def test_mc_ratio_concentrates_at_sqrt_beta():
    beta = compute_beta(1.0, 2000).beta_closed
    res = monte_carlo_ratio(1.0, 2000, 500, seed=2)
    assert abs(res.mean - np.sqrt(beta)) <= 0.02


def test_mc_ratio_deterministic_and_validates():
    a = monte_carlo_ratio(1.0, 64, 150, seed=9, alphas=(0.7,))
    b = monte_carlo_ratio(1.0, 64, 150, seed=9, alphas=(0.7,))
    assert a == b
    with pytest.raises(ValueError):
        monte_carlo_ratio(1.0, 64, 99, seed=0)


def test_mc_exceedance_below_tail_bound():
    res = monte_carlo_ratio(1.0, 10000, 300, seed=3, alphas=(0.70, 0.75, 0.80))
    for alpha, freq in res.exceedance.items():
        assert freq <= ratio_tail_bound(alpha, 1.0, 10000)


# ---------------------------------------------------------------- variance bound
@pytest.mark.parametrize("n,expected", VARIANCE_TABLE.items())
def test_variance_bound_table(n, expected):
    for sigma, ref in zip(range(1, 6), expected):
        assert variance_ratio_bound(n, sigma, 10000).bound == pytest.approx(ref, abs=1e-3)


def test_variance_bound_hand_m2():
    assert variance_ratio_bound(1, 1.0, 2).bound == pytest.approx(0.52, abs=1e-12)


def test_variance_bound_kappa():
    base = variance_ratio_bound(1, 1.0, 100).bound
    k2 = variance_ratio_bound(1, 1.0, 100, kappa=2.0).bound
    assert k2 == pytest.approx(0.5 + base / 2.0, rel=1e-12)
    with pytest.raises(ValueError):
        variance_ratio_bound(1, 1.0, 100, kappa=0.5)


def test_variance_bound_decreasing_in_sigma():
    for n in (1, 2, 3):
        vals = [variance_ratio_bound(n, s, 500).bound for s in (0.5, 1, 2, 4, 8)]
        assert all(a > b for a, b in zip(vals, vals[1:]))


# ---------------------------------------------------------------- empirical variance
def test_empirical_ratio_sigma_zero():
    assert empirical_variance_ratio(1, 0.0, 64, samples=1000, seed=4) == pytest.approx(
        1.0, abs=0.05
    )


def test_empirical_ratio_below_bound_identity_cov():
    m, samples = 500, 1500
    ratio = empirical_variance_ratio(1, 1.0, m, samples=samples, seed=5)
    bound = variance_ratio_bound(1, 1.0, m).bound
    assert ratio <= bound + 3.0 / np.sqrt(samples)


def test_empirical_ratio_below_bound_kappa2():
    m, samples = 200, 1500
    diag = np.ones(m)
    diag[: m // 2] = 2.0  # condition number 2
    ratio = empirical_variance_ratio(1, 1.0, m, covariance=diag, samples=samples, seed=6)
    bound = variance_ratio_bound(1, 1.0, m, kappa=2.0).bound
    assert ratio <= bound + 3.0 / np.sqrt(samples)


def test_empirical_ratio_validates():
    with pytest.raises(ValueError):
        empirical_variance_ratio(1, 1.0, 16, samples=10, seed=0)
    with pytest.raises(ValueError):
        empirical_variance_ratio(1, 1.0, 16, covariance=np.zeros(16), samples=1000, seed=0)
    with pytest.raises(ValueError):
        empirical_variance_ratio(1, 1.0, 16, covariance=np.ones(4), samples=1000, seed=0)


# ---------------------------------------------------------------- trace majorization
def test_trace_majorization_identity_equality():
    # A = B = I gives equality m == m; run through the public checker too
    report = eigen_product_check(sizes=(4, 8), trials=50, seed=7)
    assert report.passed
    assert report.violations == 0


def test_trace_majorization_diagonal_equality():
    # commuting sorted diagonal case attains equality
    d = np.diag([4.0, 3.0, 2.0])
    lhs = np.trace(d @ d)
    rhs = np.dot(np.sort(np.diag(d))[::-1], np.sort(np.diag(d))[::-1])
    assert lhs == rhs


def test_trace_majorization_rejects_large_sizes():
    with pytest.raises(ValueError):
        eigen_product_check(sizes=(128,))
