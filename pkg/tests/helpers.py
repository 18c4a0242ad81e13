import numpy as np

from kofn_standby.distributions import FinitePmf
from kofn_standby.orderstats import SystemSpec


def random_pmf(rng: np.random.Generator, max_len: int = 5) -> FinitePmf:
    size = int(rng.integers(1, max_len + 1))
    w = rng.random(size)
    # occasionally knock out interior atoms to get holes in the support
    if size > 2 and rng.random() < 0.2:
        w[int(rng.integers(1, size - 1))] = 0.0
    w[-1] = max(w[-1], 0.05)
    return FinitePmf(tuple(w))


def random_finite_system(rng: np.random.Generator, max_n: int = 4, max_len: int = 5) -> SystemSpec:
    n = int(rng.integers(1, max_n + 1))
    k = int(rng.integers(1, n + 1))
    return SystemSpec(n, k, [random_pmf(rng, max_len) for _ in range(n)], random_pmf(rng, max_len))


def brute_tail_sums(dist, eps: float = 1e-16, cap: int = 2_000_000) -> np.ndarray:
    """tails[t0] = sum_{t > t0} sf(t), summed until sf < eps."""
    top = dist.support_max if dist.support_max is not None else min(int(dist.isf(eps)) + 1, cap)
    sf = np.asarray(dist.sf(np.arange(top + 1)))
    rev = np.cumsum(sf[::-1])[::-1]
    return np.append(rev[1:], 0.0)
