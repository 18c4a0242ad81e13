"""Discrete lifetime distributions on {0, 1, 2, ...}.

Every family exposes the survival function ``sf(t) = P(X > t)`` (with
``sf(t) = 1`` for ``t < 0``), the pmf, a certified upper bound on the
survival tail sum ``sum_{t > t0} sf(t)`` and the inverse of that bound.
Survival functions accept a Python integer or an integer numpy array.

All instances are frozen dataclasses and therefore safe to share between
threads.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Sequence

import numpy as np

from .errors import ConditioningOnNullEvent, SpecError, UnboundedTail
from .special import (
    log_upper_inc_gamma,
    nb_sf,
    nb_sf_inverse,
    upper_inc_gamma_inverse,
)

__all__ = [
    "DiscreteLifetime",
    "Geometric",
    "NegBinomial",
    "DiscreteWeibull",
    "FinitePmf",
    "Residual",
    "sf",
    "pmf",
    "residual_transform",
    "tail_bound",
    "tail_bound_inverse",
    "smallest_index",
    "truncate",
    "Envelope",
    "max_envelope",
    "from_json",
    "to_json",
]


def _scalar_or_array(t, values: np.ndarray):
    return float(values) if np.ndim(t) == 0 else values


def smallest_index(bound: Callable[[int], float], budget: float, lower: int = 0,
                   hint: int | None = None) -> int:
    """Smallest integer ``t >= lower`` with ``bound(t) <= budget``.

    ``bound`` must be non-increasing. A closed-form ``hint`` is refined by a
    local monotone walk; without one the root is found by exponential
    bracketing followed by integer bisection.
    """
    if bound(lower) <= budget:
        return lower
    lo = lower
    if hint is not None and hint > lower and bound(hint) <= budget:
        hi = hint
    else:
        if hint is not None and hint > lower:
            lo = hint
        step = 1
        hi = lo + step
        while bound(hi) > budget:
            lo = hi
            step *= 2
            hi = lo + step
            if step > 2**62:
                raise UnboundedTail("tail bound never reaches the requested budget")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if bound(mid) > budget:
            lo = mid
        else:
            hi = mid
    return hi


class DiscreteLifetime(ABC):
    """A lifetime distribution on the nonnegative integers."""

    family: str = "abstract"

    @abstractmethod
    def _sf_nonneg(self, t: np.ndarray) -> np.ndarray:
        """Survival at integer points t >= 0 (float array)."""

    def sf(self, t):
        tt = np.asarray(t)
        out = np.ones(tt.shape, dtype=float)
        mask = tt >= 0
        if np.any(mask):
            out[mask] = self._sf_nonneg(tt[mask].astype(float))
        return _scalar_or_array(t, out)

    def cdf(self, t):
        return _scalar_or_array(t, 1.0 - np.asarray(self.sf(t)))

    def pmf(self, t):
        tt = np.asarray(t)
        out = np.zeros(tt.shape, dtype=float)
        mask = tt >= 0
        if np.any(mask):
            out[mask] = self._pmf_nonneg(tt[mask].astype(float))
        return _scalar_or_array(t, out)

    def _pmf_nonneg(self, t: np.ndarray) -> np.ndarray:
        return np.maximum(np.asarray(self.sf(t - 1)) - np.asarray(self.sf(t)), 0.0)

    @property
    def support_max(self) -> int | None:
        """Largest support point, or None for unbounded support."""
        return None

    @property
    def has_finite_mean(self) -> bool:
        return True

    @abstractmethod
    def mean(self) -> float: ...

    @abstractmethod
    def tail_bound(self, t0: int) -> float:
        """Certified upper bound on sum_{t > t0} sf(t), non-increasing in t0."""

    def _tail_bound_hint(self, budget: float) -> int | None:
        return None

    def tail_bound_inverse(self, budget: float, lower: int = 0) -> int:
        """Smallest t0 >= lower with tail_bound(t0) <= budget."""
        if budget <= 0:
            raise ValueError(f"budget must be positive, got {budget}")
        return smallest_index(self.tail_bound, budget, lower, self._tail_bound_hint(budget))

    def isf(self, v):
        """Smallest t >= 0 with sf(t) <= v, vectorized over v in (0, 1]."""
        vv = np.atleast_1d(np.asarray(v, dtype=float))
        vmin = float(vv.min())
        n = 64
        while True:
            table = np.asarray(self.sf(np.arange(n)))
            if table[-1] <= vmin:
                break
            if self.support_max is not None and n > self.support_max + 1:
                break
            n *= 2
        idx = np.searchsorted(-table, -vv, side="left")
        return int(idx[0]) if np.ndim(v) == 0 else idx

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.random(size)
        u = np.maximum(u, np.finfo(float).tiny)
        return self.isf(u)

    def to_json(self) -> dict[str, Any]:
        raise NotImplementedError


@dataclass(frozen=True)
class Geometric(DiscreteLifetime):
    """P(X = t) = p (1 - p)^t."""

    p: float
    family = "geometric"

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise SpecError(f"geometric p must lie in (0, 1), got {self.p}")

    def _sf_nonneg(self, t):
        return np.exp((t + 1.0) * math.log1p(-self.p))

    def _pmf_nonneg(self, t):
        return self.p * np.exp(t * math.log1p(-self.p))

    def mean(self) -> float:
        return (1.0 - self.p) / self.p

    def tail_bound(self, t0: int) -> float:
        # exact: sum_{t > t0} (1-p)^(t+1)
        return math.exp((t0 + 2) * math.log1p(-self.p)) / self.p

    def _tail_bound_hint(self, budget):
        x = math.log(budget * self.p) / math.log1p(-self.p) - 2.0
        return max(0, math.ceil(x)) if math.isfinite(x) else None

    def isf(self, v):
        vv = np.asarray(v, dtype=float)
        t = np.ceil(np.log(vv) / math.log1p(-self.p) - 1e-12) - 1.0
        out = np.maximum(t, 0).astype(np.int64)
        return int(out) if np.ndim(v) == 0 else out

    def to_json(self):
        return {"family": "geometric", "p": self.p}


@dataclass(frozen=True)
class NegBinomial(DiscreteLifetime):
    """Failures before the r-th success: P(X = t) = C(r+t-1, t) (1-p)^t p^r."""

    r: int
    p: float
    family = "negbinomial"

    def __post_init__(self):
        if not (isinstance(self.r, (int, np.integer)) and self.r >= 1):
            raise SpecError(f"negative binomial r must be a positive integer, got {self.r}")
        if not 0 < self.p < 1:
            raise SpecError(f"negative binomial p must lie in (0, 1), got {self.p}")

    def _sf_nonneg(self, t):
        return np.asarray(nb_sf(self.r, self.p, t))

    def _pmf_nonneg(self, t):
        r, p = self.r, self.p
        log_binom = np.zeros_like(t)
        for i in range(1, r):
            log_binom = log_binom + np.log(t + i) - math.log(i)
        return np.exp(log_binom + t * math.log1p(-p) + r * math.log(p))

    def mean(self) -> float:
        return self.r * (1.0 - self.p) / self.p

    def tail_bound(self, t0: int) -> float:
        # sum_{t > t0} sf(t) <= (r / p) * sf(t0 + 1), same success probability p
        return self.r / self.p * nb_sf(self.r, self.p, t0 + 1)

    def _tail_bound_hint(self, budget):
        target = budget * self.p / self.r
        if target >= 1:
            return None
        return max(0, nb_sf_inverse(self.r, self.p, target) - 1)

    def to_json(self):
        return {"family": "negbinomial", "r": int(self.r), "p": self.p}


@dataclass(frozen=True)
class DiscreteWeibull(DiscreteLifetime):
    """P(X > t) = q^((t+1)^beta)."""

    q: float
    beta: float
    family = "dweibull"

    def __post_init__(self):
        if not 0 < self.q < 1:
            raise SpecError(f"discrete Weibull q must lie in (0, 1), got {self.q}")
        if not self.beta > 0:
            raise SpecError(f"discrete Weibull beta must be positive, got {self.beta}")

    def _sf_nonneg(self, t):
        return np.exp((t + 1.0) ** self.beta * math.log(self.q))

    def _pmf_nonneg(self, t):
        lq = math.log(self.q)
        head = np.exp(t**self.beta * lq)
        return head * -np.expm1(((t + 1.0) ** self.beta - t**self.beta) * lq)

    def mean(self) -> float:
        # partial sum plus the integral remainder
        #   sum_{t > T} q^((t+1)^b) <= int_{T+1}^inf q^(y^b) dy
        #                            = Gamma(1/b, lam (T+1)^b) / (b lam^(1/b))
        lam = -math.log(self.q)
        b = self.beta
        n = 256
        while True:
            terms = self.sf(np.arange(n))
            total = math.fsum(terms)
            log_rem = (log_upper_inc_gamma(1.0 / b, lam * n**b)
                       - math.log(b) - math.log(lam) / b)
            if log_rem < math.log(total) - 40.0:  # remainder < 4e-18 relative
                return total
            n *= 2

    def tail_bound(self, t0: int) -> float:
        q, b = self.q, self.beta
        if b >= 1:
            return q ** (t0 + 2) / (1.0 - q)
        lam = -math.log(q)
        a = 1.0 / b + 1.0
        s0 = math.floor((t0 + 2) ** b)
        log_b = (math.log1p(-q) - 2.0 * math.log(q) - a * math.log(lam)
                 + log_upper_inc_gamma(a, (s0 + 1) * lam))
        return math.exp(log_b)

    def _tail_bound_hint(self, budget):
        q, b = self.q, self.beta
        if b >= 1:
            x = math.log(budget * (1.0 - q)) / math.log(q) - 2.0
            return max(0, math.ceil(x))
        lam = -math.log(q)
        a = 1.0 / b + 1.0
        log_y = math.log(budget) + 2.0 * math.log(q) + a * math.log(lam) - math.log1p(-q)
        if log_y >= math.lgamma(a):
            return None
        x = upper_inc_gamma_inverse(a, math.exp(log_y)) if log_y > -700 else None
        if x is None:
            return None
        return max(0, math.ceil((x / lam) ** (1.0 / b) - 2.0))

    def isf(self, v):
        vv = np.asarray(v, dtype=float)
        z = (np.log(vv) / math.log(self.q)) ** (1.0 / self.beta)
        t = np.ceil(z - 1e-12) - 1.0
        out = np.maximum(t, 0).astype(np.int64)
        return int(out) if np.ndim(v) == 0 else out

    def to_json(self):
        return {"family": "dweibull", "q": self.q, "beta": self.beta}


@dataclass(frozen=True)
class FinitePmf(DiscreteLifetime):
    """Arbitrary pmf on {0, ..., N}; the weights are normalized on construction."""

    weights: tuple[float, ...] = field()
    family = "pmf"

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise SpecError("pmf weights must be a nonempty list")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise SpecError("pmf weights must be finite and nonnegative")
        total = float(w.sum())
        if total < 1e-12:
            raise SpecError(f"pmf weights sum to {total}, which is below 1e-12")
        nz = np.nonzero(w)[0]
        w = w[: nz[-1] + 1] / total
        object.__setattr__(self, "weights", tuple(float(x) for x in w))

    @cached_property
    def _pmf_table(self) -> np.ndarray:
        return np.asarray(self.weights)

    @cached_property
    def _sf_table(self) -> np.ndarray:
        # sf(t) for t = 0..N, summed from the right for accuracy
        w = self._pmf_table
        tail = np.cumsum(w[::-1])[::-1]
        return np.append(tail[1:], 0.0)

    @cached_property
    def _tail_table(self) -> np.ndarray:
        # sum_{s > t} sf(s) for t = 0..N
        s = self._sf_table
        tail = np.cumsum(s[::-1])[::-1]
        return np.append(tail[1:], 0.0)

    @property
    def support_max(self) -> int:
        return len(self.weights) - 1

    def _sf_nonneg(self, t):
        idx = t.astype(np.int64)
        out = np.zeros(idx.shape)
        inside = idx <= self.support_max
        out[inside] = self._sf_table[idx[inside]]
        return out

    def _pmf_nonneg(self, t):
        idx = t.astype(np.int64)
        out = np.zeros(idx.shape)
        inside = idx <= self.support_max
        out[inside] = self._pmf_table[idx[inside]]
        return out

    def mean(self) -> float:
        return float(np.dot(np.arange(len(self.weights)), self._pmf_table))

    def tail_bound(self, t0: int) -> float:
        if t0 >= self.support_max:
            return 0.0
        if t0 < 0:
            return self.mean() + (-1 - t0)
        return float(self._tail_table[t0])

    def isf(self, v):
        vv = np.asarray(v, dtype=float)
        idx = np.searchsorted(-self._sf_table, -vv, side="left")
        return int(idx) if np.ndim(v) == 0 else idx

    def to_json(self):
        return {"family": "pmf", "weights": list(self.weights)}


@dataclass(frozen=True)
class Residual(DiscreteLifetime):
    """Law of [X - t | X > t]: sf(s) = base.sf(s + t) / base.sf(t) for s >= 0."""

    base: DiscreteLifetime
    t: int
    family = "residual"

    def __post_init__(self):
        if self.base.sf(self.t) <= 0:
            raise ConditioningOnNullEvent(f"P(X > {self.t}) = 0")

    @cached_property
    def _norm(self) -> float:
        return self.base.sf(self.t)

    def _sf_nonneg(self, s):
        return np.asarray(self.base.sf(s + self.t)) / self._norm

    def _pmf_nonneg(self, s):
        out = np.asarray(self.base.pmf(s + self.t)) / self._norm
        return np.where(s >= 1, out, 0.0)

    @property
    def support_max(self) -> int | None:
        m = self.base.support_max
        return None if m is None else m - self.t

    @property
    def has_finite_mean(self) -> bool:
        return self.base.has_finite_mean

    def mean(self) -> float:
        # sum_{s >= 0} sf(s+t)/sf(t) = 1 + sum_{u > t} sf(u) / sf(t)
        head = math.fsum(np.asarray(self.base.sf(np.arange(self.t + 1))))
        rest = max(self.base.mean() - head, 0.0)
        return 1.0 + rest / self._norm

    def tail_bound(self, t0: int) -> float:
        return self.base.tail_bound(t0 + self.t) / self._norm

    def isf(self, v):
        vv = np.asarray(v, dtype=float)
        out = np.asarray(self.base.isf(np.minimum(vv * self._norm, 1.0))) - self.t
        out = np.maximum(out, 1)
        return int(out) if np.ndim(v) == 0 else out

    def to_json(self):
        return {"family": "residual", "base": self.base.to_json(), "t": int(self.t)}


def sf(dist: DiscreteLifetime, t):
    return dist.sf(t)


def pmf(dist: DiscreteLifetime, t):
    return dist.pmf(t)


def residual_transform(dist: DiscreteLifetime, t: int) -> DiscreteLifetime:
    """Distribution of [X - t | X > t].

    Finite pmfs stay finite pmfs and nested residuals collapse, so repeated
    transforms never build deep wrappers.
    """
    if t < 0:
        return dist
    if dist.sf(t) <= 0:
        raise ConditioningOnNullEvent(f"P(X > {t}) = 0")
    if isinstance(dist, FinitePmf):
        w = np.asarray(dist.weights, dtype=float).copy()
        w[: t + 1] = 0.0
        return FinitePmf(tuple(np.concatenate([[0.0], w[t + 1:]])))
    if isinstance(dist, Residual):
        return Residual(dist.base, dist.t + t)
    return Residual(dist, t)


def tail_bound(dist: DiscreteLifetime, t0: int) -> float:
    return dist.tail_bound(t0)


def tail_bound_inverse(dist: DiscreteLifetime, budget: float, lower: int = 0) -> int:
    return dist.tail_bound_inverse(budget, lower)


def truncate(dist: DiscreteLifetime, eps: float = 1e-16) -> FinitePmf:
    """Finite approximation: cut where sf < eps and fold the rest into the top atom."""
    if isinstance(dist, FinitePmf):
        return dist
    top = int(dist.isf(eps))
    w = np.asarray(dist.pmf(np.arange(top + 1)), dtype=float)
    w[top] = dist.sf(top - 1)
    return FinitePmf(tuple(w))


_FAMILIES = {
    "geometric": lambda d: Geometric(float(d["p"])),
    "negbinomial": lambda d: NegBinomial(_as_int(d["r"]), float(d["p"])),
    "dweibull": lambda d: DiscreteWeibull(float(d["q"]), float(d["beta"])),
    "pmf": lambda d: FinitePmf(tuple(float(x) for x in d["weights"])),
    "residual": lambda d: residual_transform(from_json(d["base"]), _as_int(d["t"])),
}


def _as_int(x) -> int:
    if isinstance(x, bool) or not float(x).is_integer():
        raise SpecError(f"expected an integer, got {x!r}")
    return int(x)


def from_json(obj: dict[str, Any]) -> DiscreteLifetime:
    """Decode ``{"family": ..., <parameters>}``."""
    if not isinstance(obj, dict) or "family" not in obj:
        raise SpecError(f"distribution must be an object with a 'family' key: {obj!r}")
    try:
        build = _FAMILIES[obj["family"]]
    except KeyError:
        raise SpecError(f"unknown distribution family {obj['family']!r}") from None
    try:
        return build(obj)
    except KeyError as exc:
        raise SpecError(f"{obj['family']} distribution is missing parameter {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"bad {obj['family']} parameters: {exc}") from None


def to_json(dist: DiscreteLifetime) -> dict[str, Any]:
    return dist.to_json()


def dominating(dists: Sequence[DiscreteLifetime]) -> DiscreteLifetime | None:
    """A single distribution whose survival dominates every member pointwise.

    Geometric laws are read as NB(1, p) or as discrete Weibull (1 - p, 1) so
    that they mix with either family. Returns None for other mixtures.
    """
    if all(isinstance(d, Geometric) for d in dists):
        return Geometric(min(d.p for d in dists))
    if all(isinstance(d, (Geometric, NegBinomial)) for d in dists):
        r = max(getattr(d, "r", 1) for d in dists)
        return NegBinomial(r, min(d.p for d in dists))
    if all(isinstance(d, (Geometric, DiscreteWeibull)) for d in dists):
        qs = [d.q if isinstance(d, DiscreteWeibull) else 1.0 - d.p for d in dists]
        bs = [d.beta if isinstance(d, DiscreteWeibull) else 1.0 for d in dists]
        return DiscreteWeibull(max(qs), min(bs))
    return None


def family_rule(dist: DiscreteLifetime) -> str | None:
    """Name of the closed-form truncation rule tied to a parametric family."""
    if isinstance(dist, NegBinomial):
        return "t0NB"
    if isinstance(dist, DiscreteWeibull):
        return "t0dW1" if dist.beta >= 1 else "t0dW2"
    return None


@dataclass(frozen=True)
class Envelope:
    """Certified bound on sum_{t > t0} max_i sf_i(t) for a set of lifetimes."""

    bound: Callable[[int], float]
    rule: str
    hint: Callable[[float], int | None] = lambda budget: None

    def inverse(self, budget: float, lower: int = 0) -> int:
        if budget <= 0:
            raise ValueError(f"budget must be positive, got {budget}")
        return smallest_index(self.bound, budget, lower, self.hint(budget))


def max_envelope(dists: Sequence[DiscreteLifetime]) -> Envelope:
    """Pick the sharpest available bound for the pointwise-max survival tail.

    Identical laws use their own bound. Laws from one parametric family use
    a dominating member of that family. Finite supports use the exact
    envelope. Any other mixture falls back to the sum of per-law bounds.
    """
    dists = list(dists)
    if not dists:
        raise ValueError("need at least one distribution")
    if all(d == dists[0] for d in dists):
        d0 = dists[0]
        return Envelope(d0.tail_bound, family_rule(d0) or "condt0IID", d0._tail_bound_hint)
    dom = dominating(dists)
    if dom is not None:
        return Envelope(dom.tail_bound, family_rule(dom) or "condt0I", dom._tail_bound_hint)
    if all(d.support_max is not None for d in dists):
        top = max(d.support_max for d in dists)
        env = np.max([np.asarray(d.sf(np.arange(top + 1))) for d in dists], axis=0)
        tail = np.append(np.cumsum(env[::-1])[::-1][1:], 0.0)

        def exact(t0: int) -> float:
            return float(tail[t0]) if t0 <= top else 0.0

        return Envelope(exact, "condt0I")

    def summed(t0: int) -> float:
        return math.fsum(d.tail_bound(t0) for d in dists)

    def hint(budget: float) -> int:
        share = budget / len(dists)
        return max(d.tail_bound_inverse(share) for d in dists)

    return Envelope(summed, "condt0I", hint)
