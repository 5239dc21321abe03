import hashlib
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from cauchyreg.noise import (
    NoiseModel, UniformStream, benchmark_noisy_data, discrete_l2, perturb_additive,
    perturb_relative, splitmix64,
)


def test_splitmix64_reference_values():
    # first outputs of SplitMix64 seeded with 0 (published reference sequence)
    ref = [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]
    assert [int(v) for v in splitmix64(0, 0, 3)] == ref


def test_stream_is_sequential():
    a = UniformStream(9)
    first = np.concatenate([a.uniform(3), a.uniform(4)])
    assert np.array_equal(first, UniformStream(9).uniform(7))


def test_uniform_range_and_mean():
    r = UniformStream(123).uniform(200000)
    assert r.min() >= -1 and r.max() < 1
    assert abs(r.mean()) < 0.01
    assert abs(r.var() - 1 / 3) < 0.01


def test_additive_zero_eps_is_exact():
    f = np.linspace(0, 1, 11) ** 2
    assert np.array_equal(perturb_additive(f, NoiseModel("additive", 0.0, 5)), f)


def test_additive_range():
    out = perturb_additive(np.zeros(500), NoiseModel("additive", 0.1, 7))
    assert np.all(np.abs(out) <= 0.1)


def test_seed_determinism():
    m = NoiseModel("additive", 0.1, 42)
    f = np.ones(21)
    assert perturb_additive(f, m).tobytes() == perturb_additive(f, m).tobytes()


def test_determinism_across_threads():
    def digest(_):
        phi, g = benchmark_noisy_data(1e-3, 2024, 40)
        return hashlib.sha256(phi.tobytes() + g.tobytes()).hexdigest()

    with ThreadPoolExecutor(4) as pool:
        assert len(set(pool.map(digest, range(8)))) == 1


def test_relative_zero_eps():
    f = np.linspace(0, 1, 5)
    assert np.array_equal(perturb_relative(f, NoiseModel("relative", 0.0, 1), 2.0), f)


def test_relative_rejects_zero_norm():
    with pytest.raises(ValueError):
        perturb_relative(np.ones(3), NoiseModel("relative", 0.1, 1), 0.0)


def test_relative_matches_sqrt105_form():
    x = np.linspace(0, 1, 21)
    g = x**2 * (1 - x)
    eps = 0.01
    got = perturb_relative(g, NoiseModel("relative", eps, 11), 1 / np.sqrt(105))
    r = UniformStream(11).uniform(21)
    assert np.allclose(got, g * (1 + np.sqrt(105) * eps * r), rtol=1e-15, atol=0)


@pytest.mark.parametrize("K", [20, 40, 80])
@pytest.mark.parametrize("seed", [0, 1, 42])
def test_relative_norm_bound(K, seed):
    x = np.linspace(0, 1, K + 1)
    g = x**2 * (1 - x)
    eps = 0.05
    out = perturb_relative(g, NoiseModel("relative", eps, seed), 1 / np.sqrt(105))
    assert discrete_l2(out - g, K) <= eps * 1.05


def test_benchmark_noise_zero_eps():
    phi, g = benchmark_noisy_data(0.0, 3, 20)
    x = np.linspace(0, 1, 21)
    assert np.all(phi == 0)
    assert np.allclose(g, x**2 * (1 - x))


@pytest.mark.parametrize("seed", [0, 42, 2**63 + 5])
def test_benchmark_noise_bounds(seed):
    eps = 0.1
    K = 20
    phi, g = benchmark_noisy_data(eps, seed, K)
    x = np.linspace(0, 1, K + 1)
    assert np.abs(phi).max() <= eps
    assert discrete_l2(phi, K) <= eps
    assert discrete_l2(g - x**2 * (1 - x), K) <= eps * 1.05


def test_noise_model_validation():
    with pytest.raises(ValueError):
        NoiseModel("gaussian", 0.1, 1)
    with pytest.raises(ValueError):
        NoiseModel("additive", -0.1, 1)
    with pytest.raises(ValueError):
        NoiseModel("additive", 0.1, -1)
