"""Sine eigenbasis of -d^2/dx^2 on (0, 1) with Dirichlet conditions.

Coefficients are indexed from p = 1 at every public interface; arrays
store mode p at position p - 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

SQRT2 = np.sqrt(2.0)


def _default_eigenvalue(p):
    return (np.asarray(p, dtype=float) * np.pi) ** 2


def _default_basis(p, x):
    p = np.asarray(p, dtype=float)
    return SQRT2 * np.sin(p * np.pi * np.asarray(x, dtype=float))


@dataclass(frozen=True)
class EigenBasis:
    """Eigenpairs (lambda_p, phi_p) of a positive self-adjoint operator.

    The default is lambda_p = (p pi)^2, phi_p(x) = sqrt(2) sin(p pi x).
    A shifted operator such as -d^2/dx^2 + k^2 only needs a different
    ``eigenvalue_fn``.
    """

    mode_count: int
    eigenvalue_fn: Callable = field(default=_default_eigenvalue, repr=False)
    basis_fn: Callable = field(default=_default_basis, repr=False)

    def __post_init__(self):
        if self.mode_count < 1:
            raise ValueError(f"mode_count must be positive, got {self.mode_count}")

    @property
    def modes(self) -> np.ndarray:
        return np.arange(1, self.mode_count + 1)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.asarray(self.eigenvalue_fn(self.modes), dtype=float)

    def matrix(self, x) -> np.ndarray:
        """Basis functions sampled at ``x``; shape (N, len(x))."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.asarray(self.basis_fn(self.modes[:, None], x[None, :]), dtype=float)


def shifted_basis(mode_count: int, shift: float) -> EigenBasis:
    """Basis of -d^2/dx^2 + shift on (0, 1): same sines, eigenvalues moved."""
    if shift < 0:
        raise ValueError("shift must be nonnegative to keep the operator positive")
    return EigenBasis(mode_count, eigenvalue_fn=lambda p: _default_eigenvalue(p) + shift)


def eigenvalue(p: int, basis: EigenBasis | None = None) -> float:
    if int(p) != p or p < 1:
        raise ValueError(f"mode index must be a positive integer, got {p!r}")
    fn = _default_eigenvalue if basis is None else basis.eigenvalue_fn
    return float(fn(p))


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes in [0, 1] with weights; ``degree`` is the polynomial exactness."""

    nodes: np.ndarray
    weights: np.ndarray
    degree: int

    def __post_init__(self):
        if self.nodes.shape != self.weights.shape:
            raise ValueError("nodes and weights must have the same length")

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def gauss_legendre(panels: int, order: int = 8) -> QuadratureRule:
    """Composite Gauss-Legendre rule on [0, 1] with equal panels."""
    if panels < 1 or order < 1:
        raise ValueError("panels and order must be positive")
    xi, wi = np.polynomial.legendre.leggauss(order)
    h = 1.0 / panels
    left = np.arange(panels) * h
    nodes = (left[:, None] + 0.5 * h * (xi[None, :] + 1.0)).ravel()
    weights = np.tile(0.5 * h * wi, panels)
    return QuadratureRule(nodes, weights, 2 * order - 1)


def default_rule(mode_count: int) -> QuadratureRule:
    # cubic nonlinearity times the top sine puts content up to mode 4N;
    # 3N panels of 8 points give 6 nodes per half-wave of that band.
    return gauss_legendre(max(8, 3 * mode_count), 8)


def grid_rule(space_points: int) -> QuadratureRule:
    """Composite trapezoid rule on the uniform grid x_j = j / K.

    Used for data that only exist at the measurement nodes. On this grid
    the sampled sines are discretely orthogonal for p + q < 2K.
    """
    if space_points < 1:
        raise ValueError("space_points must be positive")
    nodes = np.linspace(0.0, 1.0, space_points + 1)
    weights = np.full(space_points + 1, 1.0 / space_points)
    weights[[0, -1]] *= 0.5
    return QuadratureRule(nodes, weights, 1)


def project(values, basis: EigenBasis, rule: QuadratureRule) -> np.ndarray:
    """Coefficients <f, phi_p>, p = 1..N, from samples of f at ``rule.nodes``."""
    values = np.asarray(values, dtype=float)
    if values.shape[-1] != rule.nodes.size:
        raise ValueError("samples do not match the quadrature nodes")
    return (basis.matrix(rule.nodes) * rule.weights) @ values.T


def forward_coeff(f: Callable, p: int, rule: QuadratureRule,
                  basis: EigenBasis | None = None) -> float:
    """<f, phi_p> approximated by ``rule``; ``f`` must accept an array of nodes."""
    eigenvalue(p)
    basis_fn = _default_basis if basis is None else basis.basis_fn
    values = np.asarray(f(rule.nodes), dtype=float)
    return rule.integrate(values * basis_fn(p, rule.nodes))


def synthesize(coeffs, x, basis: EigenBasis | None = None):
    """Evaluate sum_p coeffs_p phi_p(x) for scalar or array ``x`` in [0, 1]."""
    coeffs = np.asarray(coeffs, dtype=float)
    if not np.all(np.isfinite(coeffs)):
        raise ValueError("coefficients must be finite")
    xa = np.asarray(x, dtype=float)
    if np.any((xa < 0.0) | (xa > 1.0)):
        raise ValueError("x must lie in [0, 1]")
    basis = EigenBasis(coeffs.shape[0]) if basis is None else basis
    out = coeffs.T @ basis.matrix(xa.ravel())
    if xa.ndim == 0 and coeffs.ndim == 1:
        return float(out[0])
    return out.reshape(coeffs.shape[1:] + xa.shape)
