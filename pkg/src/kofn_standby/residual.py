"""Residual lifetimes of the system under three conditionings.

usual:     T > t
system:    X_{1:n} > t        (no component failed by t)
working:   X_{n-k+1:n} > t    (the k-out-of-n part still works at t)

The system-level case is computed by shifting every active lifetime to its
residual at age t and reusing the unconditional machinery, standby unchanged.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .distributions import max_envelope, residual_transform, smallest_index
from .errors import ConditioningOnNullEvent
from .lifetime import AccuracyBudget, choose_t0, expected_T, reliability_T
from .orderstats import SweepTables, SystemSpec, os_sf

__all__ = [
    "MRLKind",
    "CurvePoint",
    "Curve",
    "residual_system",
    "usual_residual_sf",
    "usual_mrl",
    "syslevel_residual_sf",
    "syslevel_mrl",
    "working_residual_sf",
    "working_mrl",
    "mrl_curve",
]

GAP_THRESHOLD = 1e-300


class MRLKind(enum.Enum):
    USUAL = "usual"
    SYSTEM = "system"
    WORKING = "working"
    RELIABILITY = "reliability"


@dataclass(frozen=True)
class CurvePoint:
    t: int
    value: float
    certified_error: float
    gap: bool = False
    note: str = ""


@dataclass(frozen=True)
class Curve:
    kind: MRLKind
    points: list[CurvePoint] = field(default_factory=list)

    @property
    def ts(self) -> np.ndarray:
        return np.array([p.t for p in self.points])

    @property
    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.points])


def residual_system(sys: SystemSpec, t: int) -> SystemSpec:
    """Actives replaced by their residual lifetimes at age t; standby untouched."""
    return SystemSpec(sys.n, sys.k, tuple(residual_transform(d, t) for d in sys.active), sys.standby)


def _all_alive_prob(sys: SystemSpec, t: int) -> float:
    return math.prod(d.sf(t) for d in sys.active)


def usual_residual_sf(sys: SystemSpec, t: int, s: int) -> float:
    """P(T - t > s | T > t)."""
    denom = reliability_T(sys, t)
    if denom <= 0:
        raise ConditioningOnNullEvent(f"P(T > {t}) = 0")
    return min(reliability_T(sys, t + s) / denom, 1.0)


def syslevel_residual_sf(sys: SystemSpec, t: int, s: int) -> float:
    """P(T - t > s | X_{1:n} > t)."""
    if _all_alive_prob(sys, t) <= 0:
        raise ConditioningOnNullEvent(f"P(X_1:n > {t}) = 0")
    return reliability_T(residual_system(sys, t), s)


def _working_joint(tables: SweepTables, t: int, s_abs: int) -> float:
    # P(T > s_abs, X_{n-k+1:n} > t) = sum_{u=t+1}^{s_abs} h(s_abs, u) + P(X_{n-k+1:n} > s_abs)
    row = tables.h_row(s_abs)
    return math.fsum(row[t + 1:]) + tables.os_sf()[s_abs]


def working_residual_sf(sys: SystemSpec, t: int, s: int) -> float:
    """P(T - t > s | X_{n-k+1:n} > t)."""
    denom = os_sf(sys.active, sys.k, t)
    if denom <= 0:
        raise ConditioningOnNullEvent(f"P(X_{sys.n - sys.k + 1}:{sys.n} > {t}) = 0")
    if t < 0:
        return reliability_T(sys, t + s)
    tables = SweepTables(sys, t + s)
    return min(_working_joint(tables, t, t + s) / denom, 1.0)


def _conditional_t0(sys: SystemSpec, t: int, d: float, cond_prob: float) -> AccuracyBudget:
    """Truncation index for sum_{s=t}^{t0} of a conditional tail.

    The budget d * cond_prob feeds the unconditional rules. For k = 1 both
    the standby tail and the envelope tail from index [(t0 + 1)/2] on must
    be at most a quarter of it (the envelope share further divided by
    2^n - 1).
    """
    scaled = d * cond_prob
    if sys.k >= 2:
        b = choose_t0(sys, scaled, allow_fast_path=False)
        t0 = max(b.t0, t)
        return AccuracyBudget(d, t0, b.bound_used, b.certified_error / cond_prob)

    factor = 2**sys.n - 1
    env = max_envelope(sys.active)
    z_tail = sys.standby.tail_bound
    z_cap = scaled / 4.0
    env_cap = scaled / (4.0 * factor)

    def worst(m: int) -> float:
        # sums from index m on equal the tail bounds at m - 1
        return max(z_tail(m - 1) / z_cap, env.bound(m - 1) / env_cap)

    hint = 1 + max(sys.standby.tail_bound_inverse(z_cap), env.inverse(env_cap))
    m = smallest_index(worst, 1.0, 1, hint)
    t0 = max(2 * m - 1, t)
    err = 2.0 * (z_tail(m - 1) + factor * env.bound(m - 1)) / cond_prob
    return AccuracyBudget(d, t0, "condt0parallel", err)


def _sweep(sys: SystemSpec, starts: np.ndarray, stops: np.ndarray, working: bool) -> np.ndarray:
    """For each i: sum_{s=starts[i]}^{stops[i]} of P(T > s) (or of the
    working joint P(T > s, X_{n-k+1:n} > starts[i]))."""
    horizon = int(stops.max())
    tables = SweepTables(sys, horizon)
    os = tables.os_sf()
    acc = np.zeros(len(starts))
    parts: list[list[float]] = [[] for _ in starts]
    for s in range(horizon + 1):
        active = (starts <= s) & (s <= stops)
        if not active.any():
            continue
        row = tables.h_row(s)
        if working:
            suffix = np.append(np.cumsum(row[::-1])[::-1], 0.0)  # suffix[j] = sum_{u>=j} row[u]
            vals = suffix[np.minimum(starts + 1, s + 1)] + os[s]
        else:
            vals = np.full(len(starts), math.fsum(row) + os[s])
        for i in np.nonzero(active)[0]:
            parts[i].append(vals[i])
    for i, p in enumerate(parts):
        acc[i] = math.fsum(p)
    return acc


def _conditional_mrls(sys: SystemSpec, ts: list[int], d: float,
                      working: bool) -> list[tuple[CurvePoint, AccuracyBudget | None]]:
    if working:
        probs = np.atleast_1d(os_sf(sys.active, sys.k, np.asarray(ts)))
    else:
        probs = _reliability_points(sys, ts)
    out: dict[int, tuple[CurvePoint, AccuracyBudget | None]] = {}
    live, budgets = [], []
    for t, p in zip(ts, probs):
        if not p >= GAP_THRESHOLD:
            out[t] = (_gap(t, p), None)
            continue
        live.append((t, p))
        budgets.append(_conditional_t0(sys, t, d, p))
    if live:
        starts = np.array([t for t, _ in live])
        stops = np.array([b.t0 for b in budgets])
        sums = _sweep(sys, starts, stops, working)
        for (t, p), b, total in zip(live, budgets, sums):
            out[t] = (CurvePoint(t, total / p, b.certified_error, note=b.bound_used), b)
    return [out[t] for t in ts]


def _gap(t: int, p: float) -> CurvePoint:
    return CurvePoint(t, math.nan, math.nan, gap=True,
                      note=f"conditioning probability {p:.3g} below {GAP_THRESHOLD:g}")


def _reliability_points(sys: SystemSpec, ts: list[int]) -> np.ndarray:
    top = max(ts)
    if top < 0:
        return np.ones(len(ts))
    tables = SweepTables(sys, top)
    os = tables.os_sf()
    out = []
    for t in ts:
        out.append(1.0 if t < 0 else min(math.fsum(tables.h_row(t)) + os[t], 1.0))
    return np.array(out)


def _single(sys: SystemSpec, t: int, d: float, working: bool) -> tuple[float, AccuracyBudget]:
    point, budget = _conditional_mrls(sys, [t], d, working)[0]
    if budget is None:
        raise ConditioningOnNullEvent(f"t={t}: {point.note}")
    return point.value, budget


def usual_mrl(sys: SystemSpec, t: int, d: float) -> tuple[float, AccuracyBudget]:
    """E(T - t | T > t) = sum_{s>=t} P(T > s) / P(T > t), truncated at t0."""
    return _single(sys, t, d, working=False)


def working_mrl(sys: SystemSpec, t: int, d: float) -> tuple[float, AccuracyBudget]:
    """E(T - t | X_{n-k+1:n} > t)."""
    return _single(sys, t, d, working=True)


def syslevel_mrl(sys: SystemSpec, t: int, d: float) -> tuple[float, AccuracyBudget]:
    """E(T - t | X_{1:n} > t) = E T' for the system of residual actives."""
    if _all_alive_prob(sys, t) <= 0:
        raise ConditioningOnNullEvent(f"P(X_1:n > {t}) = 0")
    return expected_T(residual_system(sys, t), d)


def mrl_curve(sys: SystemSpec, kind: MRLKind | str, t_range: Iterable[int], d: float) -> Curve:
    """Sample an MRL (or the reliability) curve; unreachable points become gaps."""
    kind = MRLKind(kind) if not isinstance(kind, MRLKind) else kind
    ts = [int(t) for t in t_range]
    if not ts:
        return Curve(kind, [])
    if kind is MRLKind.RELIABILITY:
        vals = _reliability_points(sys, ts)
        return Curve(kind, [CurvePoint(t, float(v), 0.0) for t, v in zip(ts, vals)])
    if kind is MRLKind.SYSTEM:
        points = []
        for t in ts:
            p = _all_alive_prob(sys, t)
            if not p >= GAP_THRESHOLD:
                points.append(_gap(t, p))
                continue
            value, b = syslevel_mrl(sys, t, d)
            points.append(CurvePoint(t, value, b.certified_error, note=b.bound_used))
        return Curve(kind, points)
    pairs = _conditional_mrls(sys, ts, d, working=kind is MRLKind.WORKING)
    return Curve(kind, [p for p, _ in pairs])
