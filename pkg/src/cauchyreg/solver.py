"""Mild solutions and the regularized solution v^eps.

All coefficients are taken against the orthonormal basis phi_p; the
time-marching scheme's w_{p,i} (coefficients of plain sin(p pi x)) are
``sqrt(2)`` times these, see :meth:`RegularizedSolution.sine_coeffs`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.optimize import brentq

from . import kernels
from .kernels import RegParams
from .model import CauchyData, SourceSpec
from .spectral import EigenBasis, default_rule, gauss_legendre, grid_rule, project

EXP_LIMIT = 700.0


class BlowUpError(FloatingPointError):
    def __init__(self, p, i):
        super().__init__(f"non-finite coefficient at mode p={p}, time index i={i}")
        self.p = p
        self.i = i


class DivergenceError(RuntimeError):
    def __init__(self, history):
        super().__init__(
            f"fixed-point iteration did not reach tolerance in {len(history)} iterations "
            f"(last increment {history[-1]:.3e})")
        self.history = list(history)


@dataclass(frozen=True)
class Grid:
    modes_N: int = 2
    time_steps_M: int = 12
    space_points_K: int = 20
    horizon_T: float = 1.0

    def __post_init__(self):
        if min(self.modes_N, self.time_steps_M, self.space_points_K) < 1:
            raise ValueError("grid sizes must be positive")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon_T, self.time_steps_M + 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.space_points_K + 1)

    @property
    def dt(self) -> float:
        return self.horizon_T / self.time_steps_M

    def time_index(self, t: float) -> int:
        i = round(t / self.dt)
        if abs(i * self.dt - t) > 1e-12 * max(1.0, self.horizon_T):
            raise ValueError(f"t={t} is not a grid time")
        return int(i)


class ModalData(NamedTuple):
    """Coefficients <phi, phi_p> and <g, phi_p>, p = 1..N."""

    phi: np.ndarray
    g: np.ndarray


def nodal_data(phi_values, g_values, grid: Grid, basis: EigenBasis | None = None) -> ModalData:
    """Project measurements at x_j = j / K with the grid trapezoid rule."""
    basis = EigenBasis(grid.modes_N) if basis is None else basis
    rule = grid_rule(grid.space_points_K)
    return ModalData(project(phi_values, basis, rule), project(g_values, basis, rule))


def function_data(data: CauchyData, basis: EigenBasis) -> ModalData:
    rule = default_rule(basis.mode_count)
    return ModalData(project(data.phi(rule.nodes), basis, rule),
                     project(data.g(rule.nodes), basis, rule))


@dataclass(frozen=True)
class RegularizedSolution:
    """Coefficient matrix ``coeffs[p - 1, i]`` of v^eps at t_i."""

    coeffs: np.ndarray
    grid: Grid
    params: RegParams
    basis: EigenBasis = field(repr=False)
    iterations: int = 0
    history: tuple = ()

    def sine_coeffs(self) -> np.ndarray:
        """w_{p,i} with v = sum_p w_{p,i} sin(p pi x)."""
        return np.sqrt(2.0) * self.coeffs

    def coefficients_at(self, t: float) -> np.ndarray:
        """Coefficients at any t in [0, T], linear in time between nodes."""
        T = self.grid.horizon_T
        if not 0.0 <= t <= T:
            raise ValueError(f"t={t} outside [0, {T}]")
        u = t / self.grid.dt
        i = min(int(math.floor(u)), self.grid.time_steps_M - 1)
        theta = u - i
        return (1.0 - theta) * self.coeffs[:, i] + theta * self.coeffs[:, i + 1]

    def field(self, x, t: float) -> np.ndarray:
        return self.coefficients_at(t) @ self.basis.matrix(x)

    def nodal(self) -> np.ndarray:
        """v on the (t_i, x_j) grid, shape (M + 1, K + 1)."""
        return self.coeffs.T @ self.basis.matrix(self.grid.x)


# -- unregularized mild solutions ---------------------------------------------

def _roots(basis: EigenBasis | None, n: int) -> np.ndarray:
    basis = EigenBasis(n) if basis is None else basis
    return np.sqrt(basis.eigenvalues)


def mild_homogeneous(phi_coeffs, g_coeffs, t: float, basis: EigenBasis | None = None) -> np.ndarray:
    """cosh(r_p t) phi_p + sinh(r_p t) / r_p g_p with r_p = sqrt(lambda_p)."""
    phi_coeffs = np.asarray(phi_coeffs, dtype=float)
    r = _roots(basis, phi_coeffs.size)
    if t < 0:
        raise ValueError("t must be nonnegative")
    if r[-1] * t > EXP_LIMIT:
        raise OverflowError(f"sqrt(lambda_N) t = {r[-1] * t:.1f} exceeds the exp range")
    return np.cosh(r * t) * phi_coeffs + np.sinh(r * t) / r * np.asarray(g_coeffs, dtype=float)


def mild_inhomogeneous(phi_coeffs, g_coeffs, f_of_t: Callable, t: float,
                       basis: EigenBasis | None = None, panels: int = 16) -> np.ndarray:
    """Homogeneous part plus int_0^t sinh(r_p (t - s)) / r_p f_p(s) ds.

    ``f_of_t(s)`` returns the N source coefficients at time s; the
    s-integral uses composite 8-point Gauss-Legendre.
    """
    out = mild_homogeneous(phi_coeffs, g_coeffs, t, basis)
    if t == 0:
        return out
    r = _roots(basis, out.size)
    rule = gauss_legendre(panels, 8)
    s = rule.nodes * t
    fs = np.column_stack([np.asarray(f_of_t(si), dtype=float) for si in s])
    kern = np.sinh(r[:, None] * (t - s[None, :])) / r[:, None]
    return out + t * (kern * fs) @ rule.weights


# -- regularized solution ---------------------------------------------------

def _exp_moments(mu, h):
    """I0 = int_0^h e^{-mu r} dr and I1 = int_0^h r e^{-mu r} dr, mu > 0."""
    x = mu * h
    i0 = -np.expm1(-x) / mu
    # 1 - e^{-x}(1 + x) loses digits for small x; use its series there
    small = x < 0.1
    xs = np.where(small, x, 0.0)
    series = np.zeros_like(xs)
    term_fact = 1.0
    for k in range(2, 14):
        term_fact *= k
        series += (-1) ** k * (k - 1) * xs**k / term_fact
    i1 = np.where(small, series, -np.expm1(-x) - x * np.exp(-x)) / mu**2
    return i0, i1


def _step_moments(eps, lam, grid: Grid):
    """Moments of sinh^eps(r (t_i - s)) / r over each step [t_{j-1}, t_j].

    Returns (A0, A1) of shape (N, M + 1, M + 1) indexed [p, i, j] with
    A0 = int k ds and A1 = int k (s - t_{j-1}) ds, zero unless 1 <= j <= i.
    """
    M, T, h = grid.time_steps_M, grid.horizon_T, grid.dt
    t = grid.times
    r = np.sqrt(lam)[:, None, None]
    i_idx = np.arange(M + 1)[:, None]
    j_idx = np.arange(M + 1)[None, :]
    active = (j_idx >= 1) & (j_idx <= i_idx)
    d = np.where(active, t[i_idx] - t[np.maximum(j_idx - 1, 0)], h)[None, :, :]
    grow = kernels.damped_growth(eps, r**2, np.minimum(d, T), T)
    decay = np.exp(-r * (d - h))
    i0, i1 = _exp_moments(r, h)
    a0 = (grow * i0 - decay * i0) / (2 * r)
    a1 = (grow * i1 - decay * (h * i0 - i1)) / (2 * r)
    mask = active[None, :, :]
    return np.where(mask, a0, 0.0), np.where(mask, a1, 0.0)


_GAUSS2 = 0.5 * (1.0 - 1.0 / np.sqrt(3.0)), 0.5 * (1.0 + 1.0 / np.sqrt(3.0))


def _forcing_contribution(source: SourceSpec, basis: EigenBasis, grid: Grid, A0, A1):
    """Forcing integrated against the kernel, forcing linear through the two
    Gauss points of each step. Shape (N, M + 1)."""
    N, M, h = basis.mode_count, grid.time_steps_M, grid.dt
    if source.forcing is None:
        return np.zeros((N, M + 1))
    rule = default_rule(N)
    t = grid.times
    lo, hi = _GAUSS2[0] * h, _GAUSS2[1] * h
    s_lo = t[:-1] + lo
    s_hi = t[:-1] + hi
    G_lo = np.column_stack([project(source.forcing_term(rule.nodes, s), basis, rule) for s in s_lo])
    G_hi = np.column_stack([project(source.forcing_term(rule.nodes, s), basis, rule) for s in s_hi])
    # pad so column j (1..M) is step j
    G_lo = np.concatenate([np.zeros((N, 1)), G_lo], axis=1)
    G_hi = np.concatenate([np.zeros((N, 1)), G_hi], axis=1)
    beta = (A1 - lo * A0) / (hi - lo)
    alpha = A0 - beta
    return np.einsum("pij,pj->pi", alpha, G_lo) + np.einsum("pij,pj->pi", beta, G_hi)


def _linear_part(data: ModalData, eps, lam, grid: Grid) -> np.ndarray:
    t = grid.times[None, :]
    lam = lam[:, None]
    T = grid.horizon_T
    return (kernels.cosh_reg(eps, lam, t, T) * np.asarray(data.phi)[:, None]
            + kernels.sinh_reg(eps, lam, t, T) / np.sqrt(lam) * np.asarray(data.g)[:, None])


class _StateProjector:
    """Coefficients of f(t, v) for v given by its modal coefficients."""

    def __init__(self, source: SourceSpec, basis: EigenBasis):
        self.source = source
        self.basis = basis
        self.rule = default_rule(basis.mode_count)
        self.phi = basis.matrix(self.rule.nodes)
        self.weighted = self.phi * self.rule.weights

    def __call__(self, t, coeffs):
        u = coeffs @ self.phi
        return self.weighted @ self.source.state_term(t, self.rule.nodes, u)


def _check_inputs(params: RegParams, grid: Grid, basis):
    if params.horizon_T != grid.horizon_T:
        raise ValueError("params and grid disagree on the horizon T")
    basis = EigenBasis(grid.modes_N) if basis is None else basis
    if basis.mode_count != grid.modes_N:
        raise ValueError("basis size differs from grid.modes_N")
    return basis


def regularized_march(source: SourceSpec, data: ModalData, params: RegParams, grid: Grid,
                      basis: EigenBasis | None = None) -> RegularizedSolution:
    """Explicit time marching of v^eps with the state term frozen per step.

    Column 0 holds the data coefficients phi_p (v_{N,0} = phi^eps). For
    i >= 1 the column is the linear part plus, for each step j <= i, the
    kernel integrated exactly against f_p(v(t_{j-1})) and against the
    forcing.
    """
    basis = _check_inputs(params, grid, basis)
    eps, lam = params.epsilon, basis.eigenvalues
    M = grid.time_steps_M
    A0, A1 = _step_moments(eps, lam, grid)
    w = _linear_part(data, eps, lam, grid)
    w += _forcing_contribution(source, basis, grid, A0, A1)
    w[:, 0] = data.phi
    if source.state_dependent:
        f_state = _StateProjector(source, basis)
        t = grid.times
        frozen = np.zeros((basis.mode_count, M + 1))
        for i in range(1, M + 1):
            frozen[:, i] = f_state(t[i - 1], w[:, i - 1])
            w[:, i] += np.einsum("pj,pj->p", A0[:, i, 1:i + 1], frozen[:, 1:i + 1])
            bad = ~np.isfinite(w[:, i])
            if bad.any():
                raise BlowUpError(int(np.argmax(bad)) + 1, i)
    else:
        bad = ~np.isfinite(w)
        if bad.any():
            p, i = np.argwhere(bad)[0]
            raise BlowUpError(int(p) + 1, int(i))
    return RegularizedSolution(w, grid, params, basis)


def picard_solve(source: SourceSpec, data: ModalData, params: RegParams, grid: Grid,
                 tol: float = 1e-10, max_iter: int = 200, basis: EigenBasis | None = None,
                 initial: Optional[np.ndarray] = None) -> RegularizedSolution:
    """Fixed point of the regularized integral map on the time grid.

    The state term is taken piecewise linear in time between grid nodes
    and integrated exactly against the kernel. Iteration starts from the
    source-free part (or ``initial``) and stops when the sup over t_i of
    the L2 increment falls below ``tol``.
    """
    basis = _check_inputs(params, grid, basis)
    eps, lam = params.epsilon, basis.eigenvalues
    A0, A1 = _step_moments(eps, lam, grid)
    h = grid.dt
    W_right = A1 / h
    W_left = A0 - W_right
    base = _linear_part(data, eps, lam, grid) + _forcing_contribution(source, basis, grid, A0, A1)
    f_state = _StateProjector(source, basis)
    t = grid.times

    def apply(w):
        if not source.state_dependent:
            return base.copy()
        f = np.column_stack([f_state(t[i], w[:, i]) for i in range(t.size)])
        # step j pairs f(t_{j-1}) with W_left[:, :, j] and f(t_j) with W_right
        f_prev = np.concatenate([np.zeros((f.shape[0], 1)), f[:, :-1]], axis=1)
        return (base + np.einsum("pij,pj->pi", W_left, f_prev)
                + np.einsum("pij,pj->pi", W_right, f))

    w = base.copy() if initial is None else np.array(initial, dtype=float)
    history = []
    for k in range(1, max_iter + 1):
        nxt = apply(w)
        if not np.all(np.isfinite(nxt)):
            p, i = np.argwhere(~np.isfinite(nxt))[0]
            raise BlowUpError(int(p) + 1, int(i))
        inc = float(np.max(np.sqrt(np.sum((nxt - w) ** 2, axis=0))))
        history.append(inc)
        w = nxt
        if inc < tol:
            return RegularizedSolution(w, grid, params, basis, iterations=k, history=tuple(history))
    raise DivergenceError(history)


def fixed_point_residual(sol: RegularizedSolution, source: SourceSpec, data: ModalData) -> float:
    """sup_i ||F(v)(t_i) - v(t_i)|| for one more application of the map."""
    again = picard_solve(source, data, sol.params, sol.grid, tol=np.inf, max_iter=1,
                         basis=sol.basis, initial=sol.coeffs)
    return float(np.max(np.sqrt(np.sum((again.coeffs - sol.coeffs) ** 2, axis=0))))


# -- terminal time ----------------------------------------------------------

def terminal_time(epsilon: float, T: float = 1.0) -> float:
    """Root t_eps in (0, T) of (T - t)^2 = eps^{2 - 2t/T}.

    In tau = T - t the left side rises and the right side falls, so a root
    exists and is unique exactly when eps < min(1, T).
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if epsilon >= T:
        raise ValueError(f"no terminal time in (0, T) for eps={epsilon} >= T={T}")
    le = math.log(epsilon)

    # log form: 2 ln(tau) - 2 (tau / T) ln(eps), same sign as the original
    def h(tau):
        return math.log(tau) - tau / T * le

    tau = brentq(h, 1e-300, T, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    return T - tau


def terminal_residual(t_eps: float, epsilon: float, T: float = 1.0) -> float:
    return (T - t_eps) ** 2 - epsilon ** (2 - 2 * t_eps / T)


@dataclass(frozen=True)
class TerminalSolution:
    """U^eps: the regularized solution on [0, T), its value at t_eps at T."""

    sol: RegularizedSolution
    t_eps: float

    def coefficients(self, t: float) -> np.ndarray:
        T = self.sol.grid.horizon_T
        if t >= T:
            return self.sol.coefficients_at(self.t_eps)
        return self.sol.coefficients_at(t)

    __call__ = coefficients

    def field(self, x, t: float) -> np.ndarray:
        return self.coefficients(t) @ self.sol.basis.matrix(x)


def assemble_terminal(sol: RegularizedSolution, t_eps: float) -> TerminalSolution:
    if not 0 < t_eps < sol.grid.horizon_T:
        raise ValueError("t_eps must lie in (0, T)")
    return TerminalSolution(sol, t_eps)
