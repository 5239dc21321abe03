import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cauchyreg.kernels import (
    RegParams, cosh_reg, damped_growth, kernel_bounds, picard_contraction_depth, sinh_reg,
    sinh_reg_diff, sobolev_bound, stability_factor,
)

PI2 = math.pi**2


def test_stability_factor_zero_noise():
    assert stability_factor(0.0, 50.0, 1.0) == 1.0


def test_stability_factor_scalar_oracle():
    expected = math.exp(-math.pi) / (0.1 + math.exp(-math.pi))
    assert stability_factor(0.1, PI2, 1.0) == pytest.approx(expected, rel=1e-15)
    assert expected == pytest.approx(0.3017438443670021, rel=1e-15)


def test_stability_factor_monotone():
    lam = (np.arange(1, 40) * np.pi) ** 2
    q = stability_factor(0.01, lam, 1.0)
    assert np.all(np.diff(q) < 0)
    eps = np.logspace(-8, -0.5, 30)
    assert np.all(np.diff(stability_factor(eps, PI2, 1.0)) < 0)


def test_stability_factor_rejects_negative_eps():
    with pytest.raises(ValueError):
        stability_factor(-0.1, PI2, 1.0)


def test_zero_eps_recovers_hyperbolic_kernels():
    for lam, t in [(PI2, 0.3), (4 * PI2, 0.9)]:
        r = math.sqrt(lam)
        assert cosh_reg(0.0, lam, t, 1.0) == pytest.approx(math.cosh(r * t), rel=1e-13)
        assert sinh_reg(0.0, lam, t, 1.0) == pytest.approx(math.sinh(r * t), rel=1e-13)


def test_kernels_at_t0():
    q = stability_factor(0.05, PI2, 1.0)
    assert cosh_reg(0.05, PI2, 0.0, 1.0) == pytest.approx((q + 1) / 2)
    assert sinh_reg(0.05, PI2, 0.0, 1.0) == pytest.approx((q - 1) / 2)
    assert sinh_reg(0.05, PI2, 0.0, 1.0) <= 0


def test_cosh_reg_bounded_example():
    assert cosh_reg(1e-2, PI2, 0.5, 1.0) <= 1e-2 ** -0.5


def test_difference_kernel_rejects_s_after_t():
    with pytest.raises(ValueError):
        sinh_reg_diff(0.1, PI2, 0.2, 0.3, 1.0)


def test_factored_form_matches_definition_and_survives_high_modes():
    eps, lam, t = 1e-3, (5 * math.pi) ** 2, 0.7
    direct = stability_factor(eps, lam, 1.0) * math.exp(math.sqrt(lam) * t)
    assert damped_growth(eps, lam, t, 1.0) == pytest.approx(direct, rel=1e-13)
    big = (400 * math.pi) ** 2  # sqrt(lam) T > 700
    assert np.isfinite(cosh_reg(1e-3, big, 0.99, 1.0))
    assert cosh_reg(1e-3, big, 0.99, 1.0) <= 1e-3 ** -0.99


def test_kernel_bounds_random_small():
    rng = np.random.default_rng(1)
    n = 20000
    p = rng.integers(1, 51, n)
    lam = (p * np.pi) ** 2
    eps = 10 ** rng.uniform(-8, math.log10(0.5), n)
    t = rng.uniform(0, 1, n)
    s = t * rng.uniform(0, 1, n)
    b1, b2, b3 = kernel_bounds(eps, lam, t, s, 1.0, PI2)
    slack = 1 + 1e-12
    assert np.all(cosh_reg(eps, lam, t, 1.0) <= b1 * slack)
    assert np.all(sinh_reg(eps, lam, t, 1.0) / np.sqrt(lam) <= b2 * slack)
    assert np.all(sinh_reg_diff(eps, lam, t, s, 1.0) / np.sqrt(lam) <= b3 * slack)
    assert np.all(damped_growth(eps, lam, t, 1.0) <= eps ** (-t) * slack)


def test_cosh_reg_nonincreasing_in_eps():
    eps = np.logspace(-10, -0.3, 50)
    for lam in (PI2, 9 * PI2):
        v = cosh_reg(eps, lam, 0.6, 1.0)
        assert np.all(np.diff(v) <= 0)


def test_eps_to_zero_gap_decreases():
    lam, t = 4 * PI2, 0.5
    exact = math.cosh(math.sqrt(lam) * t)
    gaps = [abs(cosh_reg(10.0**-k, lam, t, 1.0) - exact) for k in range(1, 13)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-6


def test_sobolev_example():
    lhs, rhs = sobolev_bound(1.0, 0.0, 0.5, 1.0)
    assert lhs == pytest.approx(1 / 3, rel=1e-15)
    assert rhs == pytest.approx(2 / math.log(2), rel=1e-15)
    assert lhs <= rhs


def test_sobolev_large_x_goes_to_zero():
    lhs, rhs = sobolev_bound(2.0, 1e4, 0.1, 1.0)
    assert lhs < 1e-7 and lhs <= rhs


@pytest.mark.parametrize("eps", [0.0, 1.0, 1.5])
def test_sobolev_rejects_eps_outside(eps):
    with pytest.raises(ValueError):
        sobolev_bound(1.0, 1.0, eps)


@settings(max_examples=300, deadline=None)
@given(st.floats(1e-3, 5.0), st.floats(0.0, 100.0), st.floats(1e-12, 1 - 1e-9), st.floats(0.1, 5.0))
def test_sobolev_inequality_holds(s, X, eps, T):
    lhs, rhs = sobolev_bound(s, X, eps, T)
    assert lhs <= rhs * (1 + 1e-12)


def _depth_oracle(K, lam1, eps, T):
    # exact rational-free search; x^m / m! computed as a running product
    x = K**2 * T * max(T, 1.0) / (lam1 * eps**2)
    m, term = 1, x
    while term >= 1:
        m += 1
        term *= x / m
    return m


def test_depth_zero_lipschitz():
    assert picard_contraction_depth(RegParams(0.1)) == 1


def test_depth_example():
    params = RegParams(0.1, 1.0, lipschitz_K=1.0)
    assert picard_contraction_depth(params) == 25
    assert _depth_oracle(1.0, PI2, 0.1, 1.0) == 25


@pytest.mark.parametrize("K, eps, T", [(0.3, 0.5, 1.0), (2.0, 0.05, 2.0), (1.0, 0.01, 0.5), (5.0, 0.2, 3.0)])
def test_depth_matches_oracle(K, eps, T):
    assert picard_contraction_depth(RegParams(eps, T, lipschitz_K=K)) == _depth_oracle(K, PI2, eps, T)


def test_depth_monotone_in_eps():
    depths = [picard_contraction_depth(RegParams(e, 1.0, lipschitz_K=1.0))
              for e in (0.001, 0.002, 0.004, 0.008, 0.016, 0.032, 0.064, 0.128)]
    assert all(b <= a for a, b in zip(depths, depths[1:]))


def test_depth_cap():
    with pytest.raises(OverflowError):
        picard_contraction_depth(RegParams(1e-6, 1.0, lipschitz_K=10.0))


def test_regparams_validation():
    with pytest.raises(ValueError):
        RegParams(0.0)
    with pytest.raises(ValueError):
        RegParams(0.1, horizon_T=0.0)
    with pytest.raises(ValueError):
        RegParams(0.1, lipschitz_K=-1.0)
