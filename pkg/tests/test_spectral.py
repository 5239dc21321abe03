import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cauchyreg.spectral import (
    EigenBasis, default_rule, eigenvalue, forward_coeff, gauss_legendre, grid_rule, project,
    shifted_basis, synthesize,
)


@pytest.mark.parametrize("p, expected", [(1, math.pi**2), (2, 4 * math.pi**2), (10, 100 * math.pi**2)])
def test_eigenvalue(p, expected):
    assert eigenvalue(p) == pytest.approx(expected, rel=1e-15)


def test_eigenvalue_rejects_zero():
    with pytest.raises(ValueError):
        eigenvalue(0)


def test_eigenvalues_increasing_and_positive():
    lam = EigenBasis(30).eigenvalues
    assert lam[0] > 0
    assert np.all(np.diff(lam) > 0)


def test_shifted_basis_moves_eigenvalues_only():
    b = shifted_basis(5, 4.0)
    assert np.allclose(b.eigenvalues, EigenBasis(5).eigenvalues + 4.0)
    assert np.allclose(b.matrix([0.3]), EigenBasis(5).matrix([0.3]))


def test_rule_weights_sum_to_one():
    for rule in (default_rule(4), gauss_legendre(3, 5), grid_rule(20)):
        assert abs(rule.weights.sum() - 1.0) < 1e-12


@pytest.mark.parametrize("order", [1, 3, 8])
def test_gauss_legendre_exact_on_stated_degree(order):
    rule = gauss_legendre(2, order)
    for k in range(rule.degree + 1):
        assert rule.integrate(rule.nodes**k) == pytest.approx(1.0 / (k + 1), rel=1e-13, abs=1e-15)


def test_orthonormality_under_default_rule():
    b = EigenBasis(16)
    rule = default_rule(16)
    gram = (b.matrix(rule.nodes) * rule.weights) @ b.matrix(rule.nodes).T
    assert np.abs(gram - np.eye(16)).max() < 1e-12


def test_grid_rule_discrete_orthogonality():
    K = 20
    b = EigenBasis(K - 1)
    rule = grid_rule(K)
    gram = (b.matrix(rule.nodes) * rule.weights) @ b.matrix(rule.nodes).T
    assert np.abs(gram - np.eye(K - 1)).max() < 1e-13


def phi3(x):
    return np.sqrt(2) * np.sin(3 * np.pi * x)


def test_forward_coeff_orthonormal_pair():
    rule = default_rule(4)
    assert forward_coeff(phi3, 3, rule) == pytest.approx(1.0, abs=1e-12)
    assert forward_coeff(phi3, 2, rule) == pytest.approx(0.0, abs=1e-12)


def test_forward_coeff_cubic_against_closed_form():
    # integration by parts: sqrt(2) int_0^1 x^2 (1 - x) sin(pi x) dx = 2 sqrt(2) / pi^3
    exact = 2 * math.sqrt(2) / math.pi**3
    rule = default_rule(4)
    fine = gauss_legendre(10 * rule.nodes.size // 8, 8)
    f = lambda x: x**2 * (1 - x)
    assert forward_coeff(f, 1, rule) == pytest.approx(exact, rel=1e-13)
    assert forward_coeff(f, 1, fine) == pytest.approx(exact, rel=1e-13)


def test_synthesize_single_mode_and_zero():
    assert synthesize([1.0, 0.0, 0.0], 0.5) == pytest.approx(math.sqrt(2))
    assert synthesize(np.zeros(5), 0.37) == 0.0


def test_synthesize_rejects_outside_interval():
    with pytest.raises(ValueError):
        synthesize([1.0], 1.5)


@pytest.mark.parametrize("n", [1, 4, 10])
def test_round_trip_small(n):
    rng = np.random.default_rng(n)
    c = rng.normal(size=n)
    rule = default_rule(n)
    got = project(synthesize(c, rule.nodes), EigenBasis(n), rule)
    assert np.allclose(got, c, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 16), st.integers(0, 2**32 - 1))
def test_round_trip_and_parseval(n, seed):
    c = np.random.default_rng(seed).uniform(-1, 1, n)
    rule = default_rule(16)
    values = synthesize(c, rule.nodes)
    assert np.abs(project(values, EigenBasis(n), rule) - c).max() < 1e-8
    assert abs(rule.integrate(values**2) - np.sum(c**2)) < 1e-8
