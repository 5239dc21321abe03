"""Regularized hyperbolic kernels and the bounds they satisfy.

The growing part Q(eps, lam) * exp(sqrt(lam) * t) is always formed as
exp(-sqrt(lam) * (T - t)) / (eps + exp(-sqrt(lam) * T)), so no raw
exp(sqrt(lam) * t) appears and high modes never overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_DEPTH = 10**6


@dataclass(frozen=True)
class RegParams:
    epsilon: float
    horizon_T: float = 1.0
    lipschitz_K: float = 0.0
    source_sup_M: float = 0.0
    source_lip_N: float = 0.0
    apriori_P: float = 0.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not self.horizon_T > 0:
            raise ValueError(f"horizon_T must be positive, got {self.horizon_T}")
        for name in ("lipschitz_K", "source_sup_M", "source_lip_N", "apriori_P"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


def _check_eps(eps):
    if np.any(np.asarray(eps) < 0):
        raise ValueError("eps must be nonnegative")


def stability_factor(eps, lam, T):
    """Q(eps, lam) = e^{-sqrt(lam) T} / (eps + e^{-sqrt(lam) T})."""
    _check_eps(eps)
    d = np.exp(-np.sqrt(lam) * T)
    return d / (eps + d)


def damped_growth(eps, lam, tau, T):
    """Q(eps, lam) * exp(sqrt(lam) * tau) in overflow-free form, tau <= T."""
    _check_eps(eps)
    r = np.sqrt(lam)
    return np.exp(-r * (T - np.asarray(tau, dtype=float))) / (eps + np.exp(-r * T))


def cosh_reg(eps, lam, t, T):
    return 0.5 * (damped_growth(eps, lam, t, T) + np.exp(-np.sqrt(lam) * np.asarray(t, dtype=float)))


def sinh_reg(eps, lam, t, T):
    return 0.5 * (damped_growth(eps, lam, t, T) - np.exp(-np.sqrt(lam) * np.asarray(t, dtype=float)))


def sinh_reg_diff(eps, lam, t, s, T):
    """sinh^eps(sqrt(lam) (t - s)) for 0 <= s <= t."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(s > t):
        raise ValueError("difference kernel needs s <= t")
    return sinh_reg(eps, lam, t - s, T)


def kernel_bounds(eps, lam, t, s, T, lam1):
    """Right-hand sides of the three kernel bounds, in the order
    (cosh, sinh / sqrt(lam), sinh_diff / sqrt(lam))."""
    eps = np.asarray(eps, dtype=float)
    r1 = np.sqrt(lam1)
    return (eps ** (-t / T), eps ** (-t / T) / r1, eps ** ((s - t) / T) / r1)


def sobolev_constant(s, T):
    """C(s) = s^s e^{1-s} (1 + T^{-s})."""
    return s**s * np.exp(1.0 - s) * (1.0 + T ** (-s))


def sobolev_bound(s, X, eps, T=1.0):
    """Both sides of eps / ((1+X)^s (eps + e^{-TX})) <= C(s) (T / ln(1/eps))^s.

    Returns ``(lhs, rhs)``. The left side is evaluated as
    1 / ((1+X)^s (1 + e^{-TX} / eps)) so that large X underflows to 0
    instead of producing inf/inf.
    """
    eps = np.asarray(eps, dtype=float)
    if np.any((eps <= 0) | (eps >= 1)):
        raise ValueError("eps must lie in (0, 1)")
    s = np.asarray(s, dtype=float)
    X = np.asarray(X, dtype=float)
    if np.any(s <= 0) or np.any(X < 0):
        raise ValueError("need s > 0 and X >= 0")
    lhs = 1.0 / ((1.0 + X) ** s * (1.0 + np.exp(-T * X) / eps))
    rhs = sobolev_constant(s, T) * (T / np.log(1.0 / eps)) ** s
    return lhs, rhs


def picard_contraction_depth(params: RegParams, lam1: float = math.pi**2) -> int:
    """Smallest m with (K^2 / (lam1 eps^2))^m (T C)^m / m! < 1, C = max(T, 1).

    From that power on, the m-fold fixed-point map is a contraction in
    the sup-in-time norm.
    """
    K = params.lipschitz_K
    if K == 0:
        return 1
    T = params.horizon_T
    log_x = math.log(K**2 * T * max(T, 1.0) / (lam1 * params.epsilon**2))
    # log(x^m / m!) first drops below zero once m > x, so start from there
    m = max(1, int(math.exp(log_x)) if log_x < math.log(MAX_DEPTH) + 1 else MAX_DEPTH + 1)
    if m > MAX_DEPTH:
        raise OverflowError("contraction depth exceeds 1e6")
    while m > 1 and (m - 1) * log_x - math.lgamma(m) < 0:
        m -= 1
    while m * log_x - math.lgamma(m + 1) >= 0:
        m += 1
        if m > MAX_DEPTH:
            raise OverflowError("contraction depth exceeds 1e6")
    return m
