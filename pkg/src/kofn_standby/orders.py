"""Stochastic-order and aging checks for discrete lifetimes.

Unbounded supports are checked up to a horizon beyond which both survivals
are below ``eps``; verdicts report that horizon and the leftover mass.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .distributions import DiscreteLifetime, DiscreteWeibull, FinitePmf, Geometric, NegBinomial
from .errors import DimensionMismatch
from .lifetime import reliability_curve
from .orderstats import SystemSpec

__all__ = [
    "OrderVerdict",
    "AgingClass",
    "AgingVerdict",
    "st_leq",
    "hr_leq",
    "ifr_class",
    "system_st_compare",
]

ST_SLACK = 1e-12
HR_SLACK = 1e-15
# dense grids beyond this are too large; heavier tails come back inconclusive
MAX_HORIZON = 1 << 20


@dataclass(frozen=True)
class OrderVerdict:
    relation: str  # "ST" or "HR"
    holds: bool
    horizon: int
    residual_mass: float
    counterexample: int | None = None


class AgingClass(enum.Enum):
    IFR = "IFR"
    DFR = "DFR"
    BOTH = "Both"
    NEITHER = "Neither"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class AgingVerdict:
    cls: AgingClass
    horizon: int | None = None
    note: str = ""


def _horizon(dists: tuple[DiscreteLifetime, ...], eps: float) -> int:
    tops = []
    for d in dists:
        if d.support_max is not None:
            tops.append(d.support_max)
        else:
            tops.append(int(min(d.isf(eps), MAX_HORIZON)))
    return min(max(max(tops), 0), MAX_HORIZON)


def _survivals(a: DiscreteLifetime, b: DiscreteLifetime, eps: float):
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    h = _horizon((a, b), eps)
    grid = np.arange(-1, h + 1)
    return h, np.asarray(a.sf(grid)), np.asarray(b.sf(grid))


def st_leq(a: DiscreteLifetime, b: DiscreteLifetime, eps: float = 1e-12) -> OrderVerdict:
    """a <=_st b: sf_a(t) <= sf_b(t) for all t."""
    h, sa, sb = _survivals(a, b, eps)
    bad = np.nonzero(sa > sb + ST_SLACK)[0]
    residual = float(max(sa[-1], sb[-1]))
    if bad.size:
        return OrderVerdict("ST", False, h, residual, int(bad[0]) - 1)
    return OrderVerdict("ST", residual <= eps, h, residual)


def hr_leq(a: DiscreteLifetime, b: DiscreteLifetime, eps: float = 1e-12) -> OrderVerdict:
    """a <=_hr b: sf_b(t) / sf_a(t) is non-decreasing (x/0 read as infinity).

    Checked through cross-products sf_b(t+1) sf_a(t) >= sf_b(t) sf_a(t+1),
    starting from t = -1 where both survivals equal one.
    """
    h, sa, sb = _survivals(a, b, eps)
    lhs = sb[1:] * sa[:-1]
    rhs = sb[:-1] * sa[1:]
    bad = np.nonzero(lhs < rhs - HR_SLACK)[0]
    residual = float(max(sa[-1], sb[-1]))
    if bad.size:
        return OrderVerdict("HR", False, h, residual, int(bad[0]) - 1)
    return OrderVerdict("HR", residual <= eps, h, residual)


def _hazard_trend(hazard: np.ndarray, tol: float = 1e-12) -> AgingClass:
    diffs = np.diff(hazard)
    up = bool(np.all(diffs >= -tol))
    down = bool(np.all(diffs <= tol))
    if up and down:
        return AgingClass.BOTH
    if up:
        return AgingClass.IFR
    if down:
        return AgingClass.DFR
    return AgingClass.NEITHER


def ifr_class(dist: DiscreteLifetime, eps: float = 1e-12) -> AgingVerdict:
    """Classify by the monotonicity of the hazard pmf(t) / sf(t - 1)."""
    if isinstance(dist, Geometric):
        return AgingVerdict(AgingClass.BOTH)
    if isinstance(dist, NegBinomial):
        return AgingVerdict(AgingClass.IFR if dist.r > 1 else AgingClass.BOTH)
    if isinstance(dist, DiscreteWeibull):
        if dist.beta > 1:
            return AgingVerdict(AgingClass.IFR)
        if dist.beta < 1:
            return AgingVerdict(AgingClass.DFR)
        return AgingVerdict(AgingClass.BOTH)
    if isinstance(dist, FinitePmf):
        w = np.asarray(dist.weights)
        nz = np.nonzero(w)[0]
        if np.any(w[nz[0]:nz[-1] + 1] == 0):
            return AgingVerdict(AgingClass.NEITHER, dist.support_max,
                                "support has holes; the aging classes assume a contiguous support")
        grid = np.arange(len(w))
        hazard = w / np.asarray(dist.sf(grid - 1))
        return AgingVerdict(_hazard_trend(hazard), dist.support_max)
    # no closed form: report what the hazard does up to a horizon
    h = _horizon((dist,), eps)
    grid = np.arange(h + 1)
    prev = np.asarray(dist.sf(grid - 1))
    hazard = np.asarray(dist.pmf(grid)) / prev
    trend = _hazard_trend(hazard)
    return AgingVerdict(AgingClass.UNKNOWN, h, f"hazard up to the horizon looks {trend.value}")


def system_st_compare(sys_a: SystemSpec, sys_b: SystemSpec, eps: float = 1e-10,
                      max_horizon: int = 1 << 13) -> OrderVerdict:
    """Check T_a <=_st T_b by comparing reliability curves up to a horizon."""
    if (sys_a.n, sys_a.k) != (sys_b.n, sys_b.k):
        raise DimensionMismatch(
            f"(n, k) differ: {(sys_a.n, sys_a.k)} vs {(sys_b.n, sys_b.k)}")
    h = 64
    while True:
        ra = reliability_curve(sys_a, h)
        rb = reliability_curve(sys_b, h)
        residual = float(max(ra[-1], rb[-1]))
        if residual <= eps or h >= max_horizon:
            break
        h *= 2
    bad = np.nonzero(ra > rb + ST_SLACK)[0]
    if bad.size:
        return OrderVerdict("ST", False, h, residual, int(bad[0]))
    # without a counterexample, a horizon cap that left too much mass is inconclusive
    return OrderVerdict("ST", residual <= eps, h, residual)
