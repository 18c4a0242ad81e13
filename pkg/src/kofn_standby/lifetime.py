"""Reliability and certified expected lifetime of the standby-augmented system.

    T = min(X_{n-k+1:n} + Z, X_{n-k+2:n}),   X_{n+1:n} = infinity,

    P(T > t) = sum_{u=0}^{t} h(t, u) + P(X_{n-k+1:n} > t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import Geometric, max_envelope, smallest_index
from .errors import UnboundedTail
from .orderstats import SweepTables, SystemSpec, geometric_os_mean, os_sf

__all__ = [
    "AccuracyBudget",
    "reliability_T",
    "reliability_curve",
    "pmf_T",
    "choose_t0",
    "expected_T",
    "finiteness_check",
]

# above this many actives the subset sums behind the exact geometric mean get slow
_GEOMETRIC_FAST_PATH_MAX_N = 16


@dataclass(frozen=True)
class AccuracyBudget:
    """Truncation certificate: the omitted tail is at most certified_error <= d."""

    d: float
    t0: int
    bound_used: str
    certified_error: float


def reliability_T(sys: SystemSpec, t: int) -> float:
    """P(T > t); equals 1 for t < 0."""
    if t < 0:
        return 1.0
    tables = SweepTables(sys, t)
    value = math.fsum(tables.h_row(t)) + tables.os_sf()[t]
    return min(value, 1.0)


def reliability_curve(sys: SystemSpec, t_max: int) -> np.ndarray:
    """P(T > t) for t = 0..t_max."""
    if t_max < 0:
        return np.zeros(0)
    tables = SweepTables(sys, t_max)
    h_sums = np.array([math.fsum(tables.h_row(t)) for t in range(t_max + 1)])
    return np.minimum(h_sums + tables.os_sf(), 1.0)


def pmf_T(sys: SystemSpec, t: int) -> float:
    """P(T = t), with rounding noise above -1e-13 clamped to zero."""
    if t < 0:
        return 0.0
    value = reliability_T(sys, t - 1) - reliability_T(sys, t)
    if value < 0 and value > -1e-13:
        return 0.0
    return value


def finiteness_check(sys: SystemSpec) -> bool:
    """Sufficient condition for E T < infinity.

    The pointwise-max survival of the actives must be summable (true when
    every active has a finite mean); for k = 1 the standby mean must also be
    finite.
    """
    ok = all(d.has_finite_mean for d in sys.active)
    if sys.k == 1:
        ok = ok and sys.standby.has_finite_mean
    return ok


def _check_tails(sys: SystemSpec) -> None:
    bad = [i for i, d in enumerate(sys.active) if not d.has_finite_mean]
    if bad:
        raise UnboundedTail(f"active components {bad} have no finite tail bound")
    if sys.k == 1 and not sys.standby.has_finite_mean:
        raise UnboundedTail("with k = 1 the standby mean must be finite")


def _generic_factor(n: int, k: int) -> int:
    return sum(math.comb(n, v) for v in range(n - k + 2))


def _geometric_fast_path_ok(sys: SystemSpec) -> bool:
    return (len(sys.active) <= _GEOMETRIC_FAST_PATH_MAX_N
            and all(isinstance(d, Geometric) for d in sys.active))


def choose_t0(sys: SystemSpec, d: float, allow_fast_path: bool = True) -> AccuracyBudget:
    """Smallest truncation index whose certified tail bound is at most d.

    For k >= 2 the tail sum_{t > t0} P(T > t) is bounded by
    S * (sum_{t > t0} max_i sf_i(t))^(k-1) with S = sum_{v <= n-k+1} C(n, v).
    For k = 1 the bound on sum_{t > t0} P(X_{n:n} > t) is (2^n - 1) times the
    envelope tail. With all-geometric actives the order statistic mean is
    exact, so for k >= 2 the geometric rule bounds only the standby part
    sum_t sum_u h(t, u), and for k = 1 nothing needs truncating.
    """
    if d <= 0:
        raise ValueError(f"d must be positive, got {d}")
    _check_tails(sys)
    n, k = sys.n, sys.k

    if k == 1 and allow_fast_path and _geometric_fast_path_ok(sys):
        # E X_{n:n} is exact, nothing is truncated
        return AccuracyBudget(d, 0, "exact-geometric", 0.0)

    if k == 1:
        factor = 2**n - 1
        env = max_envelope(sys.active)
        t0 = env.inverse(d / factor)
        while factor * env.bound(t0) > d:
            t0 += 1
        return AccuracyBudget(d, t0, "condt0parallel", factor * env.bound(t0))

    if allow_fast_path and _geometric_fast_path_ok(sys):
        q = 1.0 - min(dist.p for dist in sys.active)
        c = math.comb(n, k - 1)

        def geom_bound(t0: int) -> float:
            return c * q ** ((t0 + 2) * (k - 1)) / (1.0 - q ** (k - 1))

        x = math.log(d * (1.0 - q ** (k - 1)) / c) / ((k - 1) * math.log(q)) - 2.0
        t0 = smallest_index(geom_bound, d, 0, max(0, math.ceil(x)))
        return AccuracyBudget(d, t0, "t0geom", geom_bound(t0))

    factor = _generic_factor(n, k)
    env = max_envelope(sys.active)
    target = (d / factor) ** (1.0 / (k - 1))
    t0 = env.inverse(target)
    # the root is rounded; re-verify the certificate itself
    while factor * env.bound(t0) ** (k - 1) > d:
        t0 += 1
    return AccuracyBudget(d, t0, env.rule, factor * env.bound(t0) ** (k - 1))


def expected_T(sys: SystemSpec, d: float, allow_fast_path: bool = True) -> tuple[float, AccuracyBudget]:
    """E T to within d from below: value <= E T <= value + budget.certified_error."""
    budget = choose_t0(sys, d, allow_fast_path)
    t0 = budget.t0
    if budget.bound_used == "exact-geometric":
        return sys.standby.mean() + geometric_os_mean(sys.active, 1), budget
    if sys.k == 1:
        head = os_sf(sys.active, 1, np.arange(t0 + 1))
        return sys.standby.mean() + math.fsum(head), budget
    tables = SweepTables(sys, t0)
    h_total = math.fsum(math.fsum(tables.h_row(t)) for t in range(t0 + 1))
    if budget.bound_used == "t0geom":
        return h_total + geometric_os_mean(sys.active, sys.k), budget
    return h_total + math.fsum(tables.os_sf()), budget
