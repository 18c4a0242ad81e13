"""Special functions: upper incomplete gamma and negative binomial survival.

The incomplete gamma follows the classic series / continued-fraction split
(series below ``x < s + 1``, modified Lentz continued fraction above), carried
out in log space so that deep tails do not underflow before the caller asks
for them.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 100_000


def _log_lower_series(s: float, x: float) -> float:
    """log of the regularized lower incomplete gamma P(s, x), series form."""
    ap = s
    term = 1.0 / s
    total = term
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return math.log(total) - x + s * math.log(x) - math.lgamma(s)


def _log_upper_cf(s: float, x: float) -> float:
    """log of the regularized upper incomplete gamma Q(s, x), continued fraction."""
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.log(h) - x + s * math.log(x) - math.lgamma(s)


def log_upper_inc_gamma(s: float, x: float) -> float:
    """Natural log of Gamma(s, x) = int_x^inf u^(s-1) e^(-u) du."""
    if s <= 0:
        raise DomainError(f"shape must be positive, got {s}")
    if x < 0:
        raise DomainError(f"lower limit must be nonnegative, got {x}")
    if x == 0:
        return math.lgamma(s)
    if x < s + 1.0:
        p = math.exp(_log_lower_series(s, x))
        return math.lgamma(s) + math.log1p(-p)
    return math.lgamma(s) + _log_upper_cf(s, x)


def upper_inc_gamma(s: float, x: float) -> float:
    """Upper incomplete gamma function Gamma(s, x) (not regularized)."""
    return math.exp(log_upper_inc_gamma(s, x))


def upper_inc_gamma_inverse(s: float, y: float, xtol: float = 1e-10) -> float:
    """Solve Gamma(s, x) = y for x.

    Brackets the root by doubling and then bisects. The returned ``x`` is the
    upper end of the final bracket, so ``Gamma(s, x) <= y`` always holds; this
    is the safe side when ``x`` feeds a truncation bound.
    """
    if s <= 0:
        raise DomainError(f"shape must be positive, got {s}")
    log_gs = math.lgamma(s)
    # the margin keeps y = Gamma(s) out despite log/lgamma rounding
    if y <= 0 or math.log(y) >= log_gs - 4e-16 * max(1.0, abs(log_gs)):
        raise DomainError(f"target must lie in (0, Gamma({s})), got {y}")
    log_y = math.log(y)

    lo, hi = 0.0, max(1.0, s)
    while log_upper_inc_gamma(s, hi) > log_y:
        lo, hi = hi, 2.0 * hi
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if log_upper_inc_gamma(s, mid) > log_y:
            lo = mid
        else:
            hi = mid
        if hi - lo <= xtol and abs(math.expm1(log_upper_inc_gamma(s, hi) - log_y)) <= 1e-9:
            break
    return hi


def nb_sf(r: int, p: float, t):
    """P(Y > t) for Y ~ NB(r, p) counting failures before the r-th success.

    Evaluated as the finite sum  sum_{s<r} C(r+t, s) p^s (1-p)^(r+t-s)  with
    every term formed in log space. Accepts a scalar or an integer array.
    """
    tt = np.asarray(t, dtype=float)
    out = np.ones_like(tt)
    mask = tt >= 0
    if np.any(mask):
        m = tt[mask] + r
        lp, lq = math.log(p), math.log1p(-p)
        acc = np.zeros_like(m)
        log_binom = np.zeros_like(m)  # log C(m, s), built up term by term
        for s in range(r):
            if s > 0:
                log_binom = log_binom + np.log(m - s + 1.0) - math.log(s)
            acc += np.exp(log_binom + s * lp + (m - s) * lq)
        out[mask] = np.minimum(acc, 1.0)
    return float(out) if np.ndim(t) == 0 else out


def nb_sf_inverse(r: int, p: float, target: float) -> int:
    """Smallest integer m >= -1 with nb_sf(r, p, m) <= target."""
    if not 0 < target <= 1:
        raise DomainError(f"target must lie in (0, 1], got {target}")
    if nb_sf(r, p, -1) <= target:
        return -1
    lo, hi = -1, 0
    while nb_sf(r, p, hi) > target:
        lo, hi = hi, max(1, 2 * hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if nb_sf(r, p, mid) > target:
            lo = mid
        else:
            hi = mid
    return hi


def nb_sf_complement_inverse(r: int, p: float, target: float) -> int:
    """Inverse of the survival of NB(r, 1 - p): smallest m >= -1 with
    P(Y > m) <= target where Y counts failures before the r-th success at
    success probability ``1 - p``."""
    return nb_sf_inverse(r, 1.0 - p, target)
