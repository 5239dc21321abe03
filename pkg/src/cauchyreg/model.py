"""Cauchy data, source terms and the cubic (Lane-Emden type) benchmark."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

SOURCE_KINDS = ("zero", "time_only", "global_lipschitz", "composite")


@dataclass(frozen=True)
class CauchyData:
    """Initial value ``phi`` = u(0) and initial velocity ``g`` = u_t(0)."""

    phi: Callable
    g: Callable


def _zero_field(t, x, u):
    return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class SourceSpec:
    """Right-hand side f(t, u) of u_tt = A u + f(t, u).

    The state-dependent part is ``f_eval(t, x, u)`` (times ``a_eval`` for a
    composite source); ``forcing(x, t)`` is an additive state-independent
    part. Solvers treat the two separately: the first is frozen or
    interpolated between time nodes, the second is sampled inside each
    time step.
    """

    kind: str = "zero"
    f_eval: Callable = field(default=_zero_field, repr=False)
    a_eval: Optional[Callable] = field(default=None, repr=False)
    forcing: Optional[Callable] = field(default=None, repr=False)
    lipschitz_K: float = 0.0
    a_bound_M: float = 0.0
    a_lip_N: float = 0.0
    source_at_zero_Q: float = 0.0

    def __post_init__(self):
        if self.kind not in SOURCE_KINDS:
            raise ValueError(f"unknown source kind {self.kind!r}")
        if self.kind == "composite" and self.a_eval is None:
            raise ValueError("composite source needs a_eval")
        if self.kind == "time_only" and self.forcing is None:
            raise ValueError("time_only source needs forcing")

    @property
    def state_dependent(self) -> bool:
        return self.kind in ("global_lipschitz", "composite")

    def state_term(self, t, x, u):
        if not self.state_dependent:
            return np.zeros_like(np.asarray(u, dtype=float))
        out = self.f_eval(t, x, u)
        if self.kind == "composite":
            out = self.a_eval(t, x, u) * out
        return out

    def forcing_term(self, x, t):
        if self.forcing is None:
            return np.zeros_like(np.asarray(x, dtype=float))
        return self.forcing(x, t)


def source_eval(spec: SourceSpec, t: float, u_field, x) -> np.ndarray:
    """Pointwise f(t, u) (or a f + forcing) on the nodes ``x``."""
    u_field = np.asarray(u_field, dtype=float)
    if not np.all(np.isfinite(u_field)):
        raise ValueError("u_field contains non-finite values")
    x = np.asarray(x, dtype=float)
    return spec.state_term(t, x, u_field) + spec.forcing_term(x, t)


def check_lipschitz(spec: SourceSpec, x, weights, radius, samples=1000,
                    rng=None, t=0.5, slack=1e-9):
    """Largest violation of ||f(w) - f(v)|| <= K ||w - v|| over random pairs.

    Fields are drawn uniformly in [-radius, radius] at the nodes ``x`` and
    the norm is the weighted discrete L2 norm with ``weights``. Returns the
    maximum of lhs - K * rhs - slack (negative means consistent).
    """
    rng = np.random.default_rng(0) if rng is None else rng
    x = np.asarray(x, dtype=float)
    worst = -np.inf
    for _ in range(samples):
        w = rng.uniform(-radius, radius, x.size)
        v = rng.uniform(-radius, radius, x.size)
        df = spec.state_term(t, x, w) - spec.state_term(t, x, v)
        lhs = np.sqrt(np.dot(weights, df**2))
        rhs = np.sqrt(np.dot(weights, (w - v) ** 2))
        worst = max(worst, lhs - spec.lipschitz_K * rhs - slack)
    return worst


@dataclass(frozen=True)
class BenchmarkProblem:
    """u_tt + u_xx = u^3 / a^3 + G(x, t) on (0, 1)^2, exact u = a t x^2 (1 - x).

    With A = -d^2/dx^2 this is u_tt = A u + f with f = F(u) + G.
    """

    a_param: float = 1.0
    horizon_T: float = 1.0

    def __post_init__(self):
        if self.a_param == 0:
            raise ValueError("a_param must be nonzero")

    def F(self, u):
        return np.asarray(u, dtype=float) ** 3 / self.a_param**3

    def G(self, x, t):
        a = self.a_param
        x = np.asarray(x, dtype=float)
        return 2 * a * t * (1 - 3 * x) - t**3 * x**6 * (1 - x) ** 3

    @property
    def data(self) -> CauchyData:
        a = self.a_param
        return CauchyData(phi=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
                          g=lambda x: a * np.asarray(x, dtype=float) ** 2 * (1 - np.asarray(x, dtype=float)))

    def exact(self, x, t):
        x = np.asarray(x, dtype=float)
        return self.a_param * t * x**2 * (1 - x)

    def exact_dt(self, x, t):
        x = np.asarray(x, dtype=float)
        return self.a_param * x**2 * (1 - x)

    def exact_xx(self, x, t):
        return self.a_param * t * (2 - 6 * np.asarray(x, dtype=float))

    def effective_K(self, radius=None):
        """Lipschitz constant 3 R^2 / |a|^3 of the cubic on |u| <= R.

        Default R = max|u_ex| on [0,1]^2 (= 4|a|/27) plus a margin of 0.05|a|,
        about 0.2 for a = 1.
        """
        if radius is None:
            radius = self.field_bound()
        return 3 * radius**2 / abs(self.a_param) ** 3

    def field_bound(self):
        return abs(self.a_param) * (4.0 / 27.0 + 0.05) * self.horizon_T

    def source(self, radius=None) -> SourceSpec:
        return SourceSpec(
            kind="global_lipschitz",
            f_eval=lambda t, x, u: self.F(u),
            forcing=self.G,
            lipschitz_K=self.effective_K(radius),
        )

    def composite_source(self, radius=None) -> SourceSpec:
        """a(t, u) f(t, u) with a = 1 / (1 + u^2), f = F, forcing rebuilt so
        the exact solution is unchanged.

        |a| <= 1 and |a'(u)| = 2|u| / (1 + u^2)^2 <= 3 sqrt(3) / 8.
        """
        R = self.field_bound() if radius is None else radius

        def mult(t, x, u):
            return 1.0 / (1.0 + np.asarray(u, dtype=float) ** 2)

        def forcing(x, t):
            ue = self.exact(x, t)
            return self.exact_xx(x, t) - mult(t, x, ue) * self.F(ue)

        # d/du [u^3 / (1 + u^2)] = (3u^2 + u^4) / (1 + u^2)^2 <= 3 u^2 + u^4
        K = (3 * R**2 + R**4) / abs(self.a_param) ** 3
        return SourceSpec(
            kind="composite",
            f_eval=lambda t, x, u: self.F(u),
            a_eval=mult,
            forcing=forcing,
            lipschitz_K=K,
            a_bound_M=1.0,
            a_lip_N=3 * np.sqrt(3) / 8,
            source_at_zero_Q=0.0,
        )


def exact_eval(prob: BenchmarkProblem, x, t):
    return prob.exact(x, t)


def forward_residual(prob: BenchmarkProblem, x, t):
    """u_tt + u_xx - F(u) - G for the exact solution (u_tt = 0 analytically)."""
    u = prob.exact(x, t)
    return 0.0 + prob.exact_xx(x, t) - prob.F(u) - prob.G(x, t)


def benchmark_g_norm(a: float = 1.0) -> float:
    """||a x^2 (1 - x)||_{L2(0,1)} = |a| / sqrt(105)."""
    return abs(a) / np.sqrt(105.0)


PROBLEMS = {
    "benchmark-lane-emden": lambda a: (BenchmarkProblem(a), BenchmarkProblem(a).source()),
    "benchmark-lane-emden-composite": lambda a: (BenchmarkProblem(a), BenchmarkProblem(a).composite_source()),
}


def get_problem(name: str, a: float = 1.0):
    """Return ``(problem, source)`` for a registered problem name."""
    try:
        return PROBLEMS[name](a)
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; choose from {sorted(PROBLEMS)}") from None
