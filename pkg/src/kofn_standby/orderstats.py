"""Order statistics of independent heterogeneous discrete lifetimes.

The central quantity is

    h(t, u) = P(X_{n-k+1:n} = u, X_{n-k+2:n} > t, Z > t - u),   0 <= u <= t,

which splits the components into three categories at time u: failed before
u, failed exactly at u, and still alive after t. Summing products over all
ways of assigning components to categories is done with a small dynamic
program instead of enumerating permutations.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Sequence

import numpy as np

from .distributions import (
    DiscreteLifetime,
    Geometric,
    from_json as dist_from_json,
    max_envelope,
)
from .errors import InvalidArgs, InvalidCounts, SpecError

__all__ = [
    "SystemSpec",
    "CategoryWeights",
    "category_sum",
    "h_kn",
    "os_sf",
    "os_mean",
    "os_mean_certified",
    "geometric_os_mean",
    "SweepTables",
]


@dataclass(frozen=True)
class SystemSpec:
    """k-out-of-n system of independent actives plus one cold standby."""

    n: int
    k: int
    active: tuple[DiscreteLifetime, ...]
    standby: DiscreteLifetime

    def __post_init__(self):
        object.__setattr__(self, "active", tuple(self.active))
        if not (isinstance(self.n, int) and self.n >= 1):
            raise SpecError(f"n must be a positive integer, got {self.n!r}")
        if not (isinstance(self.k, int) and 1 <= self.k <= self.n):
            raise SpecError(f"k must satisfy 1 <= k <= n = {self.n}, got {self.k!r}")
        if len(self.active) != self.n:
            raise SpecError(f"expected {self.n} active components, got {len(self.active)}")

    @classmethod
    def iid(cls, n: int, k: int, active: DiscreteLifetime, standby: DiscreteLifetime) -> SystemSpec:
        return cls(n, k, (active,) * n, standby)

    @property
    def order_index(self) -> int:
        """r = n - k + 1: the system fails at the r-th component failure."""
        return self.n - self.k + 1

    @cached_property
    def is_iid(self) -> bool:
        return all(d == self.active[0] for d in self.active)

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> SystemSpec:
        if not isinstance(obj, dict):
            raise SpecError("system spec must be a JSON object")
        try:
            n, k = obj["n"], obj["k"]
            standby = dist_from_json(obj["standby"])
            if "iid" in obj:
                active = (dist_from_json(obj["iid"]),) * int(n)
            else:
                active = tuple(dist_from_json(d) for d in obj["active"])
        except KeyError as exc:
            raise SpecError(f"system spec is missing key {exc}") from None
        if isinstance(n, bool) or isinstance(k, bool) or not isinstance(n, int) or not isinstance(k, int):
            raise SpecError("n and k must be integers")
        return cls(n, k, active, standby)

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "k": self.k,
            "active": [d.to_json() for d in self.active],
            "standby": self.standby.to_json(),
        }


@dataclass(frozen=True)
class CategoryWeights:
    """Per-component (below, exactly, above) weights."""

    below: np.ndarray
    exact: np.ndarray
    above: np.ndarray

    def __post_init__(self):
        for name in ("below", "exact", "above"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if not (self.below.shape == self.exact.shape == self.above.shape) or self.below.ndim != 1:
            raise ValueError("weight vectors must be one-dimensional and of equal length")

    @property
    def n(self) -> int:
        return len(self.below)


def _check_counts(n: int, count_a: int, count_b: int) -> None:
    if count_a < 0 or count_b < 0 or count_a + count_b > n:
        raise InvalidCounts(f"counts ({count_a}, {count_b}) invalid for n = {n}")


def _category_dp(w: CategoryWeights, count_a: int, count_b: int) -> float:
    # table[x, y] = coefficient of x^x y^y in the partial product
    table = np.zeros((count_a + 1, count_b + 1))
    table[0, 0] = 1.0
    for a, b, c in zip(w.below, w.exact, w.above):
        new = c * table
        new[1:, :] += a * table[:-1, :]
        new[:, 1:] += b * table[:, :-1]
        table = new
    return float(table[count_a, count_b])


def _category_enumerate(w: CategoryWeights, count_a: int, count_b: int) -> float:
    # one term per split of {0..n-1} into ordered blocks of sizes
    # count_a, count_b, rest: exactly the permutation sets the DP replaces
    idx = range(w.n)
    total = 0.0
    for first in itertools.combinations(idx, count_a):
        rest = [j for j in idx if j not in first]
        for second in itertools.combinations(rest, count_b):
            third = [j for j in rest if j not in second]
            total += (math.prod(w.below[j] for j in first)
                      * math.prod(w.exact[j] for j in second)
                      * math.prod(w.above[j] for j in third))
    return total


def category_sum(weights: CategoryWeights, count_a: int, count_b: int, method: str = "dp") -> float:
    """Coefficient of x^count_a y^count_b in prod_j (a_j x + b_j y + c_j)."""
    _check_counts(weights.n, count_a, count_b)
    if method == "dp":
        return _category_dp(weights, count_a, count_b)
    if method == "enumerate":
        return _category_enumerate(weights, count_a, count_b)
    raise ValueError(f"unknown method {method!r}")


def h_kn(sys: SystemSpec, t: int, u: int) -> float:
    """P(X_{n-k+1:n} = u, X_{n-k+2:n} > t, Z > t - u) for one (t, u) pair."""
    if u < 0 or u > t:
        raise InvalidArgs(f"need 0 <= u <= t, got t={t}, u={u}")
    g = sys.standby.sf(t - u)
    if g == 0:
        return 0.0
    w = CategoryWeights(
        below=[d.cdf(u - 1) for d in sys.active],
        exact=[d.pmf(u) for d in sys.active],
        above=[d.sf(t) for d in sys.active],
    )
    m = sys.order_index
    return g * math.fsum(category_sum(w, v, m - v) for v in range(sys.n - sys.k + 1))


def _failure_count_pmf(surv: np.ndarray) -> np.ndarray:
    """Poisson-binomial pmf of the number of failures.

    ``surv`` holds survival probabilities with shape (n, ...); the result
    has shape (n + 1, ...). Survivals are used directly rather than as
    1 - failure so that tiny masses keep their relative accuracy.
    """
    n = surv.shape[0]
    out = np.zeros((n + 1,) + surv.shape[1:])
    out[0] = 1.0
    for j in range(n):
        alive = surv[j]
        dead = 1.0 - alive
        out[1:j + 2] = out[1:j + 2] * alive + out[0:j + 1] * dead
        out[0] = out[0] * alive
    return out


def os_sf(components: Sequence[DiscreteLifetime], k: int, t):
    """P(X_{n-k+1:n} > t): at most n - k components have failed by t.

    ``t`` may be an integer or an integer array.
    """
    n = len(components)
    if not 1 <= k <= n:
        raise InvalidArgs(f"k must lie in 1..{n}, got {k}")
    tt = np.asarray(t)
    surv = np.array([np.broadcast_to(d.sf(tt), tt.shape) for d in components], dtype=float)
    counts = _failure_count_pmf(surv)
    out = np.minimum(counts[: n - k + 1].sum(axis=0), 1.0)
    return float(out) if tt.ndim == 0 else out


def _os_bound_factor(n: int, k: int) -> int:
    # P(X_{n-k+1:n} > t) <= sum_{v <= n-k} C(n, v) max_i sf_i(t)
    return sum(math.comb(n, v) for v in range(n - k + 1))


def geometric_os_mean(components: Sequence[Geometric], k: int) -> float:
    """Exact E X_{n-k+1:n} for independent geometric lifetimes.

    Inclusion-exclusion over the set of survivors:
    P(at least k alive after t) = sum_{j>=k} (-1)^(j-k) C(j-1, k-1) sum_{|S|=j} Q_S^(t+1)
    with Q_S the product of (1 - p_i) over S; summing over t gives Q_S / (1 - Q_S).
    """
    n = len(components)
    qs = np.array([1.0 - d.p for d in components])
    if np.all(qs == qs[0]):
        q = qs[0]
        return math.fsum(
            (-1) ** (j - k) * math.comb(j - 1, k - 1) * math.comb(n, j) * q**j / (1.0 - q**j)
            for j in range(k, n + 1)
        )
    if n > 16:
        raise ValueError("heterogeneous geometric mean needs subset enumeration; n > 16 is too large")
    masks = np.arange(1, 2**n)
    bits = (masks[:, None] >> np.arange(n)) & 1
    sizes = bits.sum(axis=1)
    log_q = bits @ np.log(qs)
    prod = np.exp(log_q)
    terms = prod / -np.expm1(log_q)
    total = 0.0
    for j in range(k, n + 1):
        total += (-1) ** (j - k) * math.comb(j - 1, k - 1) * math.fsum(terms[sizes == j])
    return total


def os_mean_certified(components: Sequence[DiscreteLifetime], k: int, d: float) -> tuple[float, int, float]:
    """(value, t0, certified_error) for E X_{n-k+1:n}, with exact <= value + error."""
    if d <= 0:
        raise ValueError(f"d must be positive, got {d}")
    n = len(components)
    if all(isinstance(c, Geometric) for c in components) and n <= 16:
        return geometric_os_mean(components, k), -1, 0.0
    factor = _os_bound_factor(n, k)
    env = max_envelope(components)
    t0 = env.inverse(d / factor)
    while factor * env.bound(t0) > d:
        t0 += 1
    value = math.fsum(os_sf(components, k, np.arange(t0 + 1)))
    return value, t0, factor * env.bound(t0)


def os_mean(components: Sequence[DiscreteLifetime], k: int, d: float) -> float:
    """E X_{n-k+1:n} truncated so that the omitted tail is at most d."""
    return os_mean_certified(components, k, d)[0]


class SweepTables:
    """Per-system tables for sweeping h(t, .) over t = 0..horizon.

    The below/exact weights depend only on u and the above weights only on
    t, so both are tabulated once. ``h_row(t)`` returns h(t, u) for
    u = 0..t as an array.
    """

    def __init__(self, sys: SystemSpec, horizon: int):
        self.sys = sys
        self.horizon = horizon
        grid = np.arange(horizon + 1)
        sf_tab = np.array([np.asarray(d.sf(grid)) for d in sys.active])
        prev = np.array([np.asarray(d.sf(grid - 1)) for d in sys.active])
        self.above = sf_tab  # (n, horizon+1), c_j(t)
        self.below = 1.0 - prev  # a_j(u) = F_j(u - 1)
        self.exact = np.array([np.asarray(d.pmf(grid)) for d in sys.active])
        self.standby_sf = np.asarray(sys.standby.sf(grid))
        self.iid = sys.is_iid
        self._os = None

    def os_sf(self) -> np.ndarray:
        """P(X_{n-k+1:n} > t) for t = 0..horizon."""
        if self._os is None:
            counts = _failure_count_pmf(self.above)
            self._os = np.minimum(counts[: self.sys.n - self.sys.k + 1].sum(axis=0), 1.0)
        return self._os

    def h_row(self, t: int) -> np.ndarray:
        n, k = self.sys.n, self.sys.k
        m = n - k + 1
        g = self.standby_sf[t::-1]  # sf_Z(t - u) for u = 0..t
        if self.iid:
            a = self.below[0, : t + 1]
            b = self.exact[0, : t + 1]
            c = self.above[0, t]
            # C(n, m) c^(k-1) [(a+b)^m - a^m], expanded to avoid cancellation
            s = np.zeros(t + 1)
            for i in range(m):
                s += (a + b) ** i * a ** (m - 1 - i)
            return math.comb(n, m) * c ** (k - 1) * b * s * g
        a = self.below[:, : t + 1]
        b = self.exact[:, : t + 1]
        c = self.above[:, t]
        # DP over components on (#failed by u, any failure exactly at u)
        none_at_u = np.zeros((m + 1, t + 1))
        some_at_u = np.zeros((m + 1, t + 1))
        none_at_u[0] = 1.0
        for j in range(n):
            new_none = c[j] * none_at_u
            new_some = c[j] * some_at_u
            new_none[1:] += a[j] * none_at_u[:-1]
            new_some[1:] += (a[j] + b[j]) * some_at_u[:-1] + b[j] * none_at_u[:-1]
            none_at_u, some_at_u = new_none, new_some
        return some_at_u[m] * g
