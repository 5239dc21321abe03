"""Experiment runs, error tables, rate fits and report files."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .kernels import RegParams
from .model import get_problem
from .noise import benchmark_noisy_data, discrete_l2
from .solver import Grid, ModalData, RegularizedSolution, nodal_data, picard_solve, regularized_march

CSV_COLUMNS = ("epsilon", "N", "M", "K", "seed", "t", "error", "slope_fit", "slope_theory")
REPORT_TIMES = (0.25, 0.5, 0.75)
TABLE1_EPS = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)
RATE_EPS = (1e-2, 3e-3, 1e-3, 3e-4, 1e-4)


class UnfittableError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep over epsilon (and optionally the mode count N).

    ``noise`` selects the data perturbation: ``relative`` is the scheme
    with additive noise on phi and relative noise on g, ``additive`` puts
    additive noise on both, ``off`` uses exact samples.
    """

    name: str = "table1"
    problem: str = "benchmark-lane-emden"
    a_param: float = 1.0
    epsilons: tuple = TABLE1_EPS
    seed: int = 42
    modes: tuple = (2,)
    time_steps: int = 12
    space_points: int = 20
    noise: str = "relative"
    solver: str = "march"
    times: tuple = REPORT_TIMES
    out_dir: str = "out"
    fmt: str = "csv"

    def __post_init__(self):
        if any(not 0 < e < 1 for e in self.epsilons):
            raise ValueError("epsilon values must lie in (0, 1)")
        if min(self.modes) < 1 or self.time_steps < 1 or self.space_points < 1:
            raise ValueError("grid sizes must be positive")
        if self.noise not in ("additive", "relative", "off"):
            raise ValueError(f"unknown noise kind {self.noise!r}")
        if self.solver not in ("march", "picard"):
            raise ValueError(f"unknown solver {self.solver!r}")
        if self.fmt not in ("csv", "json"):
            raise ValueError(f"unknown format {self.fmt!r}")

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("out_dir")
        d.pop("fmt")
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in d.items()}


@dataclass
class ErrorReport:
    name: str
    config: dict
    rows: list = field(default_factory=list)
    runtime_s: float = 0.0

    def errors(self, t, N=None):
        """(epsilons, errors) at time t for mode count N (first N if None)."""
        N = self.rows[0]["N"] if N is None and self.rows else N
        sel = [r for r in self.rows if r["N"] == N and math.isclose(r["t"], t)]
        return np.array([r["epsilon"] for r in sel]), np.array([r["error"] for r in sel])


def error_norm(sol: RegularizedSolution, exact, t_i: float) -> float:
    """sqrt(sum_j |v(x_j, t_i) - u(x_j, t_i)|^2) over all K + 1 nodes."""
    i = sol.grid.time_index(t_i)
    x = sol.grid.x
    v = sol.coeffs[:, i] @ sol.basis.matrix(x)
    return float(np.sqrt(np.sum((v - exact(x, sol.grid.times[i])) ** 2)))


def noisy_samples(config: ExperimentConfig, epsilon: float, seed: int):
    """(phi_eps, g_eps) on x_j = j / K for the benchmark family."""
    if config.noise == "off":
        return benchmark_noisy_data(0.0, seed, config.space_points, config.a_param)
    g_kind = "relative" if config.noise == "relative" else "additive"
    return benchmark_noisy_data(epsilon, seed, config.space_points, config.a_param,
                                phi_kind="additive", g_kind=g_kind)


def solve_one(config: ExperimentConfig, epsilon: float, N: int, seed=None,
              samples=None) -> RegularizedSolution:
    prob, source = get_problem(config.problem, config.a_param)
    grid = Grid(N, config.time_steps, config.space_points, prob.horizon_T)
    seed = config.seed if seed is None else seed
    phi_eps, g_eps = noisy_samples(config, epsilon, seed) if samples is None else samples
    data = nodal_data(phi_eps, g_eps, grid)
    params = RegParams(epsilon, prob.horizon_T, lipschitz_K=source.lipschitz_K)
    if config.solver == "picard":
        return picard_solve(source, data, params, grid)
    return regularized_march(source, data, params, grid)


def fit_power_law(eps, errors):
    """Least-squares (slope, intercept) of log E against log eps."""
    eps = np.asarray(eps, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if np.any(errors <= 0):
        raise UnfittableError("errors must be positive to fit a power law")
    slope, intercept = np.polyfit(np.log(eps), np.log(errors), 1)
    return float(slope), float(intercept)


def drop_saturated(eps, errors, ratio=0.9):
    """Drop trailing small-eps points whose error fell by less than 10%."""
    order = np.argsort(eps)[::-1]
    eps = np.asarray(eps, dtype=float)[order]
    errors = np.asarray(errors, dtype=float)[order]
    n = len(eps)
    while n >= 2 and errors[n - 1] / errors[n - 2] > ratio:
        n -= 1
    return eps[:n], errors[:n]


def rate_fit(report: ErrorReport, t: float, N=None):
    """Fitted exponent of E ~ eps^slope at time t, saturated points removed."""
    eps, errors = report.errors(t, N)
    eps, errors = drop_saturated(eps, errors)
    if len(eps) < 3:
        raise UnfittableError(f"fewer than 3 unsaturated points at t={t}")
    return fit_power_law(eps, errors)


def run_table(config: ExperimentConfig) -> ErrorReport:
    """Errors at ``config.times`` for every (N, epsilon) pair."""
    prob, _ = get_problem(config.problem, config.a_param)
    T = prob.horizon_T
    start = time.perf_counter()
    report = ErrorReport(config.name, config.echo())
    for N in config.modes:
        for eps in config.epsilons:
            try:
                sol = solve_one(config, eps, N)
            except FloatingPointError as exc:
                raise FloatingPointError(f"epsilon={eps}: {exc}") from exc
            for t in config.times:
                report.rows.append({
                    "epsilon": eps, "N": N, "M": config.time_steps, "K": config.space_points,
                    "seed": config.seed, "t": t, "error": error_norm(sol, prob.exact, t),
                    "slope_fit": math.nan, "slope_theory": 1.0 - t / T,
                })
    for N in config.modes:
        for t in config.times:
            try:
                slope, _ = rate_fit(report, t, N)
            except UnfittableError:
                continue
            for r in report.rows:
                if r["N"] == N and math.isclose(r["t"], t):
                    r["slope_fit"] = slope
    report.runtime_s = time.perf_counter() - start
    return report


def stability_check(config: ExperimentConfig, seed1: int, seed2: int, epsilon: float, N=None):
    """Both sides of the data-stability estimate at every grid time.

    lhs = ||v1(t) - v2(t)||^2 and
    rhs = 3 exp(3 T^2 K^2 / lam1) eps^{-2t/T} (||dphi||^2 + ||dg||^2 / lam1),
    with data differences measured in the trapezoid L2 norm on x_j.
    """
    N = config.modes[0] if N is None else N
    s1 = noisy_samples(config, epsilon, seed1)
    s2 = noisy_samples(config, epsilon, seed2)
    v1 = solve_one(config, epsilon, N, samples=s1)
    v2 = solve_one(config, epsilon, N, samples=s2)
    grid, K = v1.grid, v1.params.lipschitz_K
    T = grid.horizon_T
    lam1 = float(v1.basis.eigenvalues[0])
    dphi = discrete_l2(s1[0] - s2[0], grid.space_points_K) ** 2
    dg = discrete_l2(s1[1] - s2[1], grid.space_points_K) ** 2
    lhs = np.sum((v1.coeffs - v2.coeffs) ** 2, axis=0)
    t = grid.times
    rhs = 3.0 * math.exp(3 * T**2 * K**2 / lam1) * epsilon ** (-2 * t / T) * (dphi + dg / lam1)
    return [{"epsilon": epsilon, "seed1": seed1, "seed2": seed2, "t": float(ti),
             "lhs": float(l), "rhs": float(r), "holds": bool(l <= r)}
            for ti, l, r in zip(t, lhs, rhs)]


# -- emission ---------------------------------------------------------------

def _fmt(v):
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def report_csv(report: ErrorReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in report.rows:
        writer.writerow([_fmt(r[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def report_json(report: ErrorReport) -> str:
    doc = {
        "name": report.name,
        "config": report.config,
        "columns": list(CSV_COLUMNS),
        "rows": [{c: _json_safe(r[c]) for c in CSV_COLUMNS} for r in report.rows],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _write(path, text):
    try:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return path


def emit(report: ErrorReport, out_dir: str, fmt: str = "csv") -> str:
    """Write the report as ``<out_dir>/<name>.<fmt>``; returns the path."""
    if fmt == "csv":
        text = report_csv(report)
    elif fmt == "json":
        text = report_json(report)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return _write(os.path.join(out_dir, f"{report.name}.{fmt}"), text)


def emit_rows(rows, columns, path, fmt="csv", config=None) -> str:
    """Generic table writer used for stability rows and solution grids."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for r in rows:
            writer.writerow([_fmt(r[c]) for c in columns])
        text = buf.getvalue()
    else:
        doc = {"columns": list(columns), "rows": [{c: _json_safe(r[c]) for c in columns} for r in rows]}
        if config is not None:
            doc["config"] = config
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    return _write(path, text)


def solution_rows(sol: RegularizedSolution, exact):
    """(x, t, v, u_ex) on the full (t_i, x_j) grid."""
    V = sol.nodal()
    rows = []
    for i, t in enumerate(sol.grid.times):
        for j, x in enumerate(sol.grid.x):
            rows.append({"x": float(x), "t": float(t), "v": float(V[i, j]),
                         "u_ex": float(exact(x, t))})
    return rows


def table1_config(**kw) -> ExperimentConfig:
    return replace(ExperimentConfig(), **kw)


def table2_config(**kw) -> ExperimentConfig:
    return replace(ExperimentConfig(name="table2", epsilons=(1e-4,), modes=(2, 3, 4)), **kw)


def rate_config(**kw) -> ExperimentConfig:
    return replace(ExperimentConfig(name="rate", epsilons=RATE_EPS, modes=(20,), time_steps=60,
                                    space_points=80, noise="off"), **kw)


def stability_config(**kw) -> ExperimentConfig:
    return replace(ExperimentConfig(name="stability", epsilons=(1e-1, 1e-2, 1e-3)), **kw)
