"""Ground truth straight from T = min(X_{n-k+1:n} + Z, X_{n-k+2:n}).

Both oracles sort the sampled or enumerated active lifetimes and form T
directly, sharing no code with the analytic modules beyond the
distribution objects themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import DiscreteLifetime, FinitePmf, truncate
from .errors import ConditioningOnNullEvent, ConditioningTooRare, SpecError, TooLarge
from .orderstats import SystemSpec

__all__ = ["Query", "SimResult", "enumerate_exact", "simulate", "system_lifetimes"]

MAX_OUTCOMES = 10**7
MIN_ACCEPTANCE = 1e-6
_CHUNK = 1 << 18
_CONDITIONS = ("none", "usual", "system", "working")


@dataclass(frozen=True)
class Query:
    """A statistic of T, optionally conditioned on an event at time t.

    stat="mean": E(T - t | event); stat="sf": P(T - t > s | event).
    With condition "none", t is ignored and the unconditional E T or
    P(T > s) is returned.
    """

    stat: str = "mean"
    condition: str = "none"
    t: int = 0
    s: int = 0

    def __post_init__(self):
        if self.stat not in ("mean", "sf"):
            raise SpecError(f"stat must be 'mean' or 'sf', got {self.stat!r}")
        if self.condition not in _CONDITIONS:
            raise SpecError(f"condition must be one of {_CONDITIONS}, got {self.condition!r}")

    @classmethod
    def parse(cls, text: str) -> Query:
        """Parse 'ET' or comma-separated key=value pairs, e.g.
        'stat=sf,condition=usual,t=3,s=2'."""
        text = text.strip()
        if text in ("ET", "mean"):
            return cls()
        fields: dict[str, object] = {}
        for part in text.split(","):
            key, sep, value = part.partition("=")
            if not sep:
                raise SpecError(f"bad query fragment {part!r}")
            key = key.strip()
            if key in ("t", "s"):
                fields[key] = int(value)
            elif key in ("stat", "condition"):
                fields[key] = value.strip()
            else:
                raise SpecError(f"unknown query key {key!r}")
        return cls(**fields)


@dataclass(frozen=True)
class SimResult:
    estimate: float
    std_error: float
    n_samples: int
    seed: int


def system_lifetimes(sorted_active: np.ndarray, standby: np.ndarray, k: int) -> np.ndarray:
    """T per row, given actives sorted ascending along axis 1."""
    n = sorted_active.shape[1]
    r = n - k  # zero-based index of X_{n-k+1:n}
    with_standby = sorted_active[:, r] + standby
    if k == 1:
        return with_standby
    return np.minimum(with_standby, sorted_active[:, r + 1])


def _condition_mask(cond: str, t: int, life: np.ndarray, sorted_active: np.ndarray, k: int):
    if cond == "none":
        return None
    if cond == "usual":
        return life > t
    if cond == "system":
        return sorted_active[:, 0] > t
    return sorted_active[:, sorted_active.shape[1] - k] > t


def _statistic(q: Query, life: np.ndarray) -> np.ndarray:
    if q.condition == "none":
        return life.astype(float) if q.stat == "mean" else (life > q.s).astype(float)
    shifted = life - q.t
    return shifted.astype(float) if q.stat == "mean" else (shifted > q.s).astype(float)


def enumerate_exact(sys: SystemSpec, query: Query, max_outcomes: int = MAX_OUTCOMES,
                    eps: float = 1e-16) -> float:
    """Exact value by summing over every joint outcome of (X_1..X_n, Z).

    Unbounded laws are first cut where survival drops below ``eps`` with the
    remainder placed on the top atom.
    """
    dists: list[FinitePmf] = [truncate(d, eps) for d in (*sys.active, sys.standby)]
    sizes = [len(d.weights) for d in dists]
    total = math.prod(sizes)
    if total > max_outcomes:
        raise TooLarge(f"{total} joint outcomes exceed the limit of {max_outcomes}")
    weights = [np.asarray(d.weights) for d in dists]
    num_parts, den_parts = [], []
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, total))
        idx = np.unravel_index(flat, sizes)
        prob = np.ones(len(flat))
        for w, i in zip(weights, idx):
            prob = prob * w[i]
        active = np.sort(np.stack(idx[:-1], axis=1), axis=1)
        life = system_lifetimes(active, idx[-1], sys.k)
        mask = _condition_mask(query.condition, query.t, life, active, sys.k)
        if mask is not None:
            prob = prob * mask
        num_parts.append(float(np.dot(prob, _statistic(query, life))))
        den_parts.append(float(prob.sum()))
    den = math.fsum(den_parts)
    if query.condition != "none" and den <= 0:
        raise ConditioningOnNullEvent(f"conditioning event '{query.condition}' at t={query.t} has probability 0")
    num = math.fsum(num_parts)
    return num if query.condition == "none" else num / den


def _stream(seed: int, key: tuple[int, ...]) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def _draw(dist: DiscreteLifetime, rng: np.random.Generator, size: int) -> np.ndarray:
    return np.asarray(dist.sample(rng, size), dtype=np.int64)


def simulate(sys: SystemSpec, query: Query, n_samples: int, seed: int) -> SimResult:
    """Monte Carlo estimate with one independent substream per unit.

    The standby draws from spawn key (0,) and active j from (1, j), so a
    component's draws do not depend on n. Conditional queries reject draws
    outside the conditioning event.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    z_rng = _stream(seed, (0,))
    x_rngs = [_stream(seed, (1, j)) for j in range(sys.n)]
    values_kept = []
    accepted = 0
    for start in range(0, n_samples, _CHUNK):
        size = min(_CHUNK, n_samples - start)
        z = _draw(sys.standby, z_rng, size)
        x = np.stack([_draw(d, g, size) for d, g in zip(sys.active, x_rngs)], axis=1)
        x.sort(axis=1)
        life = system_lifetimes(x, z, sys.k)
        mask = _condition_mask(query.condition, query.t, life, x, sys.k)
        stat = _statistic(query, life)
        if mask is not None:
            stat = stat[mask]
        accepted += len(stat)
        values_kept.append(stat)
    if accepted / n_samples < MIN_ACCEPTANCE or accepted == 0:
        raise ConditioningTooRare(f"accepted {accepted} of {n_samples} draws")
    values = np.concatenate(values_kept)
    mean = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(accepted)) if accepted > 1 else 0.0
    return SimResult(mean, se, accepted, seed)
