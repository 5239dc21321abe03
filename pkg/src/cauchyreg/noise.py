"""Seeded uniform measurement noise for the Cauchy data.

Draws come from SplitMix64 written out here, so a (seed, node count)
pair yields the same bytes on every platform and numpy version. Each
generator is a counter: draw k of seed s is mix(s + (k + 1) * GAMMA).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import grid_rule

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1
NOISE_KINDS = ("additive", "relative", "off")


def splitmix64(seed: int, start: int, count: int) -> np.ndarray:
    """Raw 64-bit outputs ``start .. start + count - 1`` of the stream."""
    k = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & _MASK) + k * _GAMMA
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        z = z ^ (z >> np.uint64(31))
    return z


class UniformStream:
    """Sequential U[-1, 1] draws; 53-bit mantissa from each 64-bit word."""

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK
        self.position = 0

    def uniform(self, n: int) -> np.ndarray:
        z = splitmix64(self.seed, self.position, n)
        self.position += n
        return (z >> np.uint64(11)).astype(np.float64) * 2.0**-52 - 1.0


@dataclass(frozen=True)
class NoiseModel:
    kind: str = "additive"
    epsilon: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if not 0 <= self.seed <= _MASK:
            raise ValueError("seed must be a 64-bit unsigned integer")


def _stream(model, stream):
    return UniformStream(model.seed) if stream is None else stream


def perturb_additive(f_values, model: NoiseModel, stream=None) -> np.ndarray:
    """f(x_j) + eps r_j."""
    f_values = np.asarray(f_values, dtype=float)
    r = _stream(model, stream).uniform(f_values.size)
    return f_values + model.epsilon * r


def perturb_relative(f_values, model: NoiseModel, norm_f: float, stream=None) -> np.ndarray:
    """f(x_j) (1 + eps r_j / ||f||)."""
    if not norm_f > 0:
        raise ValueError("norm_f must be positive")
    f_values = np.asarray(f_values, dtype=float)
    r = _stream(model, stream).uniform(f_values.size)
    return f_values * (1.0 + model.epsilon * r / norm_f)


def perturb(f_values, model: NoiseModel, norm_f=None, stream=None) -> np.ndarray:
    if model.kind == "off":
        return np.asarray(f_values, dtype=float).copy()
    if model.kind == "additive":
        return perturb_additive(f_values, model, stream)
    return perturb_relative(f_values, model, norm_f, stream)


def benchmark_noisy_data(epsilon: float, seed: int, space_points: int = 20, a: float = 1.0,
                         phi_kind: str = "additive", g_kind: str = "relative"):
    """Noisy (phi, g) samples on x_j = j / K for the cubic benchmark.

    phi = 0 gets eps r; g = a x^2 (1 - x) gets g (1 + sqrt(105) eps r / |a|).
    The phi draws come first, then the g draws, from one stream.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    x = grid_rule(space_points).nodes
    phi = np.zeros_like(x)
    g = a * x**2 * (1 - x)
    stream = UniformStream(seed)
    norm_g = abs(a) / np.sqrt(105.0)
    # norm for a relative perturbation of phi = 0 is undefined; fall back to additive
    phi_model = NoiseModel("additive" if phi_kind == "relative" else phi_kind, epsilon, seed)
    g_model = NoiseModel(g_kind, epsilon, seed)
    phi_eps = perturb(phi, phi_model, stream=stream)
    g_eps = perturb(g, g_model, norm_f=norm_g, stream=stream)
    return phi_eps, g_eps


def discrete_l2(values, space_points: int) -> float:
    """Trapezoid L2(0, 1) norm of samples on x_j = j / K."""
    w = grid_rule(space_points).weights
    return float(np.sqrt(np.dot(w, np.asarray(values, dtype=float) ** 2)))
