"""Command line entry point: ``cauchyreg {table1,table2,rate,stability,solve}``.

Settings come from, in increasing priority: the subcommand defaults, a
``--config`` file of ``key = value`` lines, and explicit flags. Config
keys mirror the long flag names (``epsilon``, ``modes``, ``time-steps``,
``space-points``, ``seed``, ``noise``, ``solver``, ``a``, ``out``,
``format``, ``problem``, ``pairs``).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import harness
from .model import get_problem
from .solver import assemble_terminal, terminal_time

DEFAULTS = {
    "table1": harness.table1_config,
    "table2": harness.table2_config,
    "rate": harness.rate_config,
    "stability": harness.stability_config,
    "solve": lambda: harness.table1_config(name="solve", epsilons=(1e-3,), modes=(4,)),
}

NOISE_HELP = (
    "data perturbation: 'relative' = additive eps*rand on phi and "
    "g*(1 + eps*rand/||g||) on g; 'additive' = eps*rand on both; 'off' = exact data. "
    "One uniform draw per space node x_j = j/K (phi first, then g), so changing K "
    "changes the stream."
)


def _floats(text):
    return tuple(float(v) for v in str(text).replace(" ", "").split(",") if v)


def _ints(text):
    return tuple(int(v) for v in str(text).replace(" ", "").split(",") if v)


# key -> (config field, converter)
_KEYS = {
    "problem": ("problem", str),
    "a": ("a_param", float),
    "epsilon": ("epsilons", _floats),
    "modes": ("modes", _ints),
    "time-steps": ("time_steps", int),
    "space-points": ("space_points", int),
    "seed": ("seed", int),
    "noise": ("noise", str),
    "solver": ("solver", str),
    "out": ("out_dir", str),
    "format": ("fmt", str),
}


def read_config(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("_", "-")
            if key not in _KEYS and key != "pairs":
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = value
    return values


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cauchyreg",
        description="Regularized Cauchy problem for u_tt = A u + f(t, u): tables, rates, stability.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "table1": "error table over eps = 1e-1..1e-5 with N = 2, M = 12, K = 20",
        "table2": "error table over N = 2, 3, 4 at eps = 1e-4",
        "rate": "noise-free eps sweep on a fine grid and fitted convergence rates",
        "stability": "data-stability inequality for random seed pairs",
        "solve": "one regularized solution; writes the (x, t, v, u_ex) grid",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("--config", help="key = value file; flags override it")
        p.add_argument("--problem", help="problem name (default benchmark-lane-emden)")
        p.add_argument("--epsilon", help="comma-separated noise levels in (0, 1)")
        p.add_argument("--modes", help="mode count N, or a comma-separated list")
        p.add_argument("--time-steps", dest="time_steps", help="time steps M")
        p.add_argument("--space-points", dest="space_points", help="space intervals K")
        p.add_argument("--seed", help="64-bit noise seed")
        p.add_argument("--noise", choices=("additive", "relative", "off"), help=NOISE_HELP)
        p.add_argument("--solver", choices=("march", "picard"))
        p.add_argument("--a", help="benchmark parameter a (nonzero)")
        p.add_argument("--out", help="output directory")
        p.add_argument("--format", choices=("csv", "json"))
        if name == "stability":
            p.add_argument("--pairs", help="number of seed pairs (seed+2k, seed+2k+1); default 20")
    return parser


def resolve(args):
    """Merge defaults, config file and flags into an ExperimentConfig."""
    config = DEFAULTS[args.command]()
    values = read_config(args.config) if args.config else {}
    for key in _KEYS:
        flag = getattr(args, key.replace("-", "_"), None)
        if flag is not None:
            values[key] = flag
    if getattr(args, "pairs", None) is not None:
        values["pairs"] = args.pairs
    changes = {_KEYS[k][0]: _KEYS[k][1](v) for k, v in values.items() if k in _KEYS}
    pairs = int(values.get("pairs", 20))
    return replace(config, **changes), pairs


def _print_report(report):
    for N in sorted({r["N"] for r in report.rows}):
        for r in (r for r in report.rows if r["N"] == N):
            print(f"N={N} eps={r['epsilon']:.1e} t={r['t']:.4g} E={r['error']:.10e}")
        for t in report.config["times"]:
            row = next(r for r in report.rows if r["N"] == N and math.isclose(r["t"], t))
            fit = "unfittable" if math.isnan(row["slope_fit"]) else f"{row['slope_fit']:.4f}"
            print(f"N={N} t={t:.4g} slope_fit={fit} slope_theory={row['slope_theory']:.4f}")


def run(args):
    config, pairs = resolve(args)
    ext = config.fmt
    if args.command in ("table1", "table2", "rate"):
        report = harness.run_table(config)
        path = harness.emit(report, config.out_dir, config.fmt)
        _print_report(report)
        print(f"wrote {path} ({report.runtime_s:.2f} s)", file=sys.stderr)
        return 0
    if args.command == "stability":
        rows = []
        for eps in config.epsilons:
            for k in range(pairs):
                rows += harness.stability_check(config, config.seed + 2 * k, config.seed + 2 * k + 1, eps)
        cols = ("epsilon", "seed1", "seed2", "t", "lhs", "rhs", "holds")
        path = harness.emit_rows(rows, cols, os.path.join(config.out_dir, f"stability.{ext}"),
                                 config.fmt, config.echo())
        bad = [r for r in rows if not r["holds"]]
        print(f"{len(rows) - len(bad)}/{len(rows)} rows satisfy lhs <= rhs; wrote {path}")
        if bad:
            raise AssertionError(f"stability inequality violated in {len(bad)} rows")
        return 0
    # solve
    eps, N = config.epsilons[0], config.modes[0]
    prob, _ = get_problem(config.problem, config.a_param)
    sol = harness.solve_one(config, eps, N)
    path = harness.emit_rows(harness.solution_rows(sol, prob.exact), ("x", "t", "v", "u_ex"),
                             os.path.join(config.out_dir, f"solution.{ext}"), config.fmt, config.echo())
    T = prob.horizon_T
    t_eps = terminal_time(eps, T)
    U = assemble_terminal(sol, t_eps)
    x = sol.grid.x
    err_T = float(np.sqrt(np.sum((U.field(x, T) - prob.exact(x, T)) ** 2)))
    for t in config.times:
        print(f"t={t:.4g} E={harness.error_norm(sol, prob.exact, t):.10e}")
    print(f"t_eps={t_eps:.12f} E(T)={err_T:.10e}")
    print(f"wrote {path}")
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except Exception as exc:  # noqa: BLE001 - reported as one machine-readable line
        print("error " + json.dumps({"type": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
